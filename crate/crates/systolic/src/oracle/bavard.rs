//! Shortest loops on the folded-profile surface whose systolic ratio
//! is sharp among the non-orientable flat-to-warped comparisons.
//!
//! The surface is the quotient of the `(theta, phi)` plane with metric
//! `dphi^2 + f(phi)^2 dtheta^2`, where `f` folds the cosine with
//! quarter-turn fold angle, by the group generated by the full theta
//! loop, the height translation by four fold angles, and the glide
//! that adds a half turn in theta while reflecting the height.  The
//! glide inverts the height translation under conjugation, so the
//! quotient is one-sided.
//!
//! Two of the three generator classes have closed-form lengths (the
//! height translation moves at unit vertical speed, and the equator
//! loop sits where the profile is smallest).  The glide class is
//! measured on a grid graph, with the metric's theta-invariance
//! collapsing the source set to one fiber.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::metric::BavardProfile;

use super::{ClassEstimate, ClassMethod};

/// Fold angle of the sharp profile: an eighth of a turn.
pub const FOLD_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

/// Systole, area, and ratio of the folded-profile surface.
#[derive(Clone, Debug)]
pub struct BavardEstimate {
    /// Minimum over the generator classes.
    pub systole: f64,
    /// Closed-form surface area.
    pub area: f64,
    /// Squared systole over area.
    pub ratio: f64,
    pub resolution: f64,
    pub classes: Vec<ClassEstimate>,
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Length of the straight coordinate segment from `(0, phi_a)` to
/// `(dtheta, phi_a + dphi)`, split at the fold kinks of the profile.
fn segment_len(profile: &BavardProfile, phi_a: f64, dphi: f64, dtheta: f64) -> f64 {
    let phi0 = profile.phi0();
    let phi_b = phi_a + dphi;
    // Parameter values where the segment crosses an odd multiple of
    // the fold angle (profile derivative kinks).
    let mut cuts = vec![0.0, 1.0];
    let (lo, hi) = if dphi >= 0.0 {
        (phi_a, phi_b)
    } else {
        (phi_b, phi_a)
    };
    let mut k = (lo / phi0).floor() as i64 - 1;
    while (k as f64) * phi0 <= hi + phi0 {
        if k.rem_euclid(2) == 1 {
            let phi_k = k as f64 * phi0;
            if phi_k > lo && phi_k < hi && dphi != 0.0 {
                cuts.push((phi_k - phi_a) / dphi);
            }
        }
        k += 1;
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let span = w[1] - w[0];
        if span <= 1e-15 {
            continue;
        }
        let mid = (w[0] + w[1]) / 2.0;
        let half = span / 2.0;
        let mut piece = 0.0;
        for (x, gw) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            let t = mid + half * x;
            let f = profile.f(phi_a + t * dphi);
            piece += gw * (dphi * dphi + f * f * dtheta * dtheta).sqrt();
        }
        total += half * piece;
    }
    total
}

struct FoldGraph {
    ntheta: usize,
    nlevels: usize,
    htheta: f64,
    hphi: f64,
    mphi: usize,
    /// Horizontal step weight per level.
    wtheta: Vec<f64>,
    /// Diagonal and knight weights, indexed by the lower level of the
    /// move: (1 theta, 1 phi), (1 theta, 2 phi), (2 theta, 1 phi).
    w11: Vec<f64>,
    w12: Vec<f64>,
    w21: Vec<f64>,
    f_floor: f64,
}

impl FoldGraph {
    fn phi_of(&self, level: usize) -> f64 {
        (level as f64 - self.mphi as f64) * self.hphi
    }

    fn heuristic(&self, dtheta_cells: i64, dlevels: i64) -> f64 {
        let half = self.ntheta as i64 / 2;
        let wrapped = (dtheta_cells.rem_euclid(self.ntheta as i64) - half).abs();
        let dtheta = (half - wrapped) as f64 * self.htheta;
        let dphi = dlevels as f64 * self.hphi;
        (self.f_floor * dtheta).hypot(dphi)
    }

    /// Bounded A* between two nodes; `None` when every path exceeds
    /// the bound.
    fn search(
        &self,
        dist: &mut [f64],
        touched: &mut Vec<u32>,
        src: (usize, usize),
        dst: (usize, usize),
        bound: f64,
    ) -> Option<f64> {
        for &t in touched.iter() {
            dist[t as usize] = f64::INFINITY;
        }
        touched.clear();
        let idx = |it: usize, l: usize| (l * self.ntheta + it) as u32;
        let target = idx(dst.0, dst.1);
        let h0 = self.heuristic(dst.0 as i64 - src.0 as i64, dst.1 as i64 - src.1 as i64);
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();
        dist[idx(src.0, src.1) as usize] = 0.0;
        touched.push(idx(src.0, src.1));
        heap.push(Reverse((h0.to_bits(), idx(src.0, src.1))));
        let moves: [(i64, i64); 16] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
            (1, 2),
            (1, -2),
            (-1, 2),
            (-1, -2),
            (2, 1),
            (2, -1),
            (-2, 1),
            (-2, -1),
        ];
        while let Some(Reverse((fbits, u))) = heap.pop() {
            let f = f64::from_bits(fbits);
            if f > bound {
                return None;
            }
            if u == target {
                return Some(dist[u as usize]);
            }
            let it = u as usize % self.ntheta;
            let l = u as usize / self.ntheta;
            let du = dist[u as usize];
            let hu = self.heuristic(dst.0 as i64 - it as i64, dst.1 as i64 - l as i64);
            if f > du + hu + 1e-12 {
                continue;
            }
            for &(dt, dl) in &moves {
                let l2 = l as i64 + dl;
                if l2 < 0 || l2 >= self.nlevels as i64 {
                    continue;
                }
                let l2 = l2 as usize;
                let it2 = (it as i64 + dt).rem_euclid(self.ntheta as i64) as usize;
                let lower = l.min(l2);
                let w = match (dt.abs(), dl.abs()) {
                    (1, 0) => self.wtheta[l],
                    (0, 1) => self.hphi,
                    (1, 1) => self.w11[lower],
                    (1, 2) => self.w12[lower],
                    (2, 1) => self.w21[lower],
                    _ => unreachable!(),
                };
                let v = idx(it2, l2);
                let nd = du + w;
                if nd < dist[v as usize] {
                    if dist[v as usize].is_infinite() {
                        touched.push(v);
                    }
                    dist[v as usize] = nd;
                    let hv =
                        self.heuristic(dst.0 as i64 - it2 as i64, dst.1 as i64 - l2 as i64);
                    heap.push(Reverse(((nd + hv).to_bits(), v)));
                }
            }
        }
        None
    }
}

/// Measures the systole and ratio of the sharp folded-profile surface
/// at grid resolution `h`.
pub fn bavard_estimate(h: f64) -> Result<BavardEstimate> {
    if !(h.is_finite() && h > 0.0 && h < FOLD_ANGLE) {
        return Err(Error::InvalidParameter(format!(
            "resolution must lie in (0, {FOLD_ANGLE:.4}) to resolve the fold, got {h}"
        )));
    }
    let profile = BavardProfile::new(FOLD_ANGLE)?;
    let phi0 = profile.phi0();

    let ntheta = 2 * (std::f64::consts::PI / h).ceil() as usize;
    let htheta = 2.0 * std::f64::consts::PI / ntheta as f64;
    let mphi = (phi0 / h).ceil() as usize;
    let hphi = phi0 / mphi as f64;
    // Strip: one fold-angle margin below zero and above four folds.
    let nlevels = 6 * mphi + 1;

    let phi_of = |l: usize| (l as f64 - mphi as f64) * hphi;
    let wtheta: Vec<f64> = (0..nlevels).map(|l| htheta * profile.f(phi_of(l))).collect();
    let table = |dphi_cells: f64, dtheta_cells: f64| -> Vec<f64> {
        (0..nlevels - 1)
            .map(|l| {
                segment_len(
                    &profile,
                    phi_of(l),
                    dphi_cells * hphi,
                    dtheta_cells * htheta,
                )
            })
            .collect()
    };
    let graph = FoldGraph {
        ntheta,
        nlevels,
        htheta,
        hphi,
        mphi,
        wtheta,
        w11: table(1.0, 1.0),
        w12: table(2.0, 1.0),
        w21: table(1.0, 2.0),
        f_floor: phi0.cos(),
    };

    // Closed forms: the height translation moves four fold angles at
    // unit speed; the equator loop runs where the profile bottoms out.
    let beta = 4.0 * phi0;
    let equator = 2.0 * std::f64::consts::PI * phi0.cos();

    // Glide class: half turn in theta, height reflected through two
    // folds.  The level fixed by the reflection carries an exact
    // horizontal path; it seeds the bound for the search.
    let half = ntheta / 2;
    let mid = 3 * mphi;
    let mut best = half as f64 * graph.wtheta[mid];
    let mut best_level = mid;
    let mut lbs: Vec<(f64, usize)> = (0..nlevels)
        .map(|l| {
            let target_l = 6 * mphi - l;
            (
                graph.heuristic(half as i64, target_l as i64 - l as i64),
                l,
            )
        })
        .collect();
    lbs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut dist = vec![f64::INFINITY; ntheta * nlevels];
    let mut touched = Vec::new();
    for &(lb, l) in &lbs {
        if lb >= best {
            break;
        }
        if let Some(d) = graph.search(&mut dist, &mut touched, (0, l), (half, 6 * mphi - l), best)
        {
            if d < best {
                best = d;
                best_level = l;
            }
        }
    }

    let classes = vec![
        ClassEstimate {
            label: "height translation".into(),
            value: beta,
            method: ClassMethod::Exact,
            base_point: None,
        },
        ClassEstimate {
            label: "equator loop".into(),
            value: equator,
            method: ClassMethod::Exact,
            base_point: None,
        },
        ClassEstimate {
            label: "glide with half turn".into(),
            value: best,
            method: ClassMethod::Graph,
            base_point: Some(Vec3::new(0.0, graph.phi_of(best_level), 0.0)),
        },
    ];
    let systole = beta.min(equator).min(best);
    let area = std::f64::consts::PI * profile.integral(4.0 * phi0);
    Ok(BavardEstimate {
        systole,
        area,
        ratio: systole * systole / area,
        resolution: h,
        classes,
    })
}

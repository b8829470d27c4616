//! The warped metric `dx^2 + dy^2 + psi(x, y) dz^2` with
//! `psi = cos^2(dist((x, y), lattice))`, plus flat comparison metrics and
//! the periodic cosine profile for the Klein bottle cross-check.
//!
//! The warp factor is continuous everywhere and smooth away from the
//! Voronoi cell walls, so curve lengths are integrated segment by
//! segment with each segment split exactly where it changes Voronoi
//! cell; a fixed-order Gauss rule is then accurate on every piece.

use crate::error::{Error, Result};
use crate::geom::{Vec2, Vec3};
use crate::lattice::Lattice2D;

/// Gauss-Legendre nodes on [-1, 1], order 8.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Longest sub-interval handed to a single Gauss panel.
const MAX_PANEL_LEN: f64 = 0.75;

/// Warp factor of the singular metric: `cos^2` of the distance to the
/// lattice.  Positive as long as the circumradius stays below pi/2.
pub fn psi(lattice: &Lattice2D, p: Vec2) -> f64 {
    let c = lattice.dist_to_lattice(p).cos();
    c * c
}

/// A metric on the universal cover.
#[derive(Clone, Debug)]
pub enum MetricSpec {
    /// Euclidean metric; the basis spans the translation lattice of the
    /// flat torus and is kept for volume and Gram computations.
    Flat { basis: [Vec3; 3] },
    /// Warped product over a planar lattice, periodic with vertical
    /// period `vertical_period` in z.
    Singular {
        lattice: Lattice2D,
        vertical_period: f64,
    },
}

impl MetricSpec {
    /// Euclidean metric with a full-rank translation basis.
    pub fn flat(basis: [Vec3; 3]) -> Result<Self> {
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("flat basis must be finite".into()));
        }
        let det = basis[0].dot(basis[1].cross(basis[2]));
        if det.abs() < 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "flat basis is degenerate (det = {det})"
            )));
        }
        Ok(MetricSpec::Flat { basis })
    }

    /// Warped metric over `lattice`.  Requires the cell circumradius to
    /// stay below pi/2 so that the warp factor is positive.
    pub fn singular(lattice: Lattice2D, vertical_period: f64) -> Result<Self> {
        let radius = lattice.circumradius();
        if radius >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::CellTooLarge { radius });
        }
        if !vertical_period.is_finite() || vertical_period <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "vertical period must be positive and finite, got {vertical_period}"
            )));
        }
        Ok(MetricSpec::Singular {
            lattice,
            vertical_period,
        })
    }

    pub fn lattice(&self) -> Option<&Lattice2D> {
        match self {
            MetricSpec::Singular { lattice, .. } => Some(lattice),
            MetricSpec::Flat { .. } => None,
        }
    }

    pub fn vertical_period(&self) -> Option<f64> {
        match self {
            MetricSpec::Singular {
                vertical_period, ..
            } => Some(*vertical_period),
            MetricSpec::Flat { .. } => None,
        }
    }

    /// Metric tensor at `q`: the constant Gram matrix of the basis for
    /// flat metrics, `diag(1, 1, psi(x, y))` for the warped one.
    pub fn metric_tensor(&self, q: Vec3) -> [[f64; 3]; 3] {
        match self {
            MetricSpec::Flat { basis } => {
                let mut g = [[0.0; 3]; 3];
                for (i, bi) in basis.iter().enumerate() {
                    for (j, bj) in basis.iter().enumerate() {
                        g[i][j] = bi.dot(*bj);
                    }
                }
                g
            }
            MetricSpec::Singular { lattice, .. } => {
                let w = psi(lattice, q.xy());
                [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, w]]
            }
        }
    }
}

/// Piecewise-linear curve in the universal cover.
#[derive(Clone, Debug)]
pub struct Polyline3 {
    points: Vec<Vec3>,
}

impl Polyline3 {
    /// At least two points, all finite, no zero-length segment.
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "polyline needs at least two points".into(),
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "polyline has non-finite coordinates".into(),
            ));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "polyline has a zero-length segment".into(),
            ));
        }
        Ok(Polyline3 { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Straight segment as a two-point polyline.
    pub fn segment(p: Vec3, q: Vec3) -> Result<Self> {
        Polyline3::new(vec![p, q])
    }
}

/// Length of `poly` in `spec`.
pub fn curve_length(poly: &Polyline3, spec: &MetricSpec) -> f64 {
    poly.points
        .windows(2)
        .map(|w| segment_length(w[0], w[1], spec))
        .sum()
}

/// Length of the straight segment from `p` to `q`.
pub fn segment_length(p: Vec3, q: Vec3, spec: &MetricSpec) -> f64 {
    match spec {
        MetricSpec::Flat { .. } => (q - p).norm(),
        MetricSpec::Singular { lattice, .. } => {
            let d = q - p;
            let hxy2 = d.xy().norm2();
            let dz2 = d.z * d.z;
            if dz2 == 0.0 {
                // Horizontal directions are Euclidean.
                return hxy2.sqrt();
            }
            let mut total = 0.0;
            let mut t0 = 0.0;
            let crossings = wall_crossings(p.xy(), q.xy(), lattice);
            for t1 in crossings.into_iter().chain(std::iter::once(1.0)) {
                total += span_length(p, d, t0, t1, hxy2, dz2, lattice);
                t0 = t1;
            }
            total
        }
    }
}

/// Integrate the speed `sqrt(|d_xy|^2 + psi dz^2)` over `t in [t0, t1]`
/// (one Voronoi cell), splitting into panels short enough for the
/// fixed-order Gauss rule.
fn span_length(p: Vec3, d: Vec3, t0: f64, t1: f64, hxy2: f64, dz2: f64, lat: &Lattice2D) -> f64 {
    let seg_len = (d.norm2()).sqrt() * (t1 - t0);
    let panels = (seg_len / MAX_PANEL_LEN).ceil().max(1.0) as usize;
    let step = (t1 - t0) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let a = t0 + step * k as f64;
        let mid = a + 0.5 * step;
        let half = 0.5 * step;
        let mut panel = 0.0;
        for (x, w) in GL8 {
            let t = mid + half * x;
            let pt = Vec2::new(p.x + d.x * t, p.y + d.y * t);
            panel += w * (hxy2 + psi(lat, pt) * dz2).sqrt();
        }
        sum += panel * half;
    }
    sum
}

/// Parameters in (0, 1) where the horizontal trace of the segment
/// changes nearest lattice point, in increasing order.
///
/// All squared distances to candidate centres differ by affine
/// functions of the parameter, so the nearest-centre assignment is a
/// lower envelope of lines and every breakpoint solves a linear
/// equation exactly.
pub fn wall_crossings(p: Vec2, q: Vec2, lat: &Lattice2D) -> Vec<f64> {
    let d = q - p;
    let len = d.norm();
    if len == 0.0 {
        return Vec::new();
    }
    // Candidate centres: 3x3 neighbourhoods around samples spaced well
    // below one apothem along the segment.
    let mut candidates: Vec<(i64, i64)> = Vec::new();
    let steps = (len / lat.apothem() * 2.0).ceil().max(1.0) as usize;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let (u, v) = lat.lattice_coords(p + d * t);
        let (i0, j0) = (u.round() as i64, v.round() as i64);
        for di in -1..=1 {
            for dj in -1..=1 {
                candidates.push((i0 + di, j0 + dj));
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let mut crossings = Vec::new();
    let (_, mut cur) = lat.nearest_center(p);
    let mut t_cur = 0.0;
    // Each iteration advances strictly; the candidate set bounds the
    // number of distinct cells the segment can visit.
    for _ in 0..candidates.len() {
        let ccur = lat.center(cur.0, cur.1);
        let mut next: Option<(f64, (i64, i64))> = None;
        for &ij in &candidates {
            if ij == cur {
                continue;
            }
            let c = lat.center(ij.0, ij.1);
            let w = c - ccur;
            // g(t) = |x(t)-c|^2 - |x(t)-ccur|^2 = g0 - 2 t d.w
            let g0 = (p - c).norm2() - (p - ccur).norm2();
            let slope = 2.0 * d.dot(w);
            if slope <= 0.0 {
                continue;
            }
            let t = g0 / slope;
            if t <= t_cur + 1e-15 || t >= 1.0 {
                continue;
            }
            match next {
                Some((tb, ijb)) if t > tb || (t == tb && ij >= ijb) => {}
                _ => next = Some((t, ij)),
            }
        }
        match next {
            Some((t, ij)) => {
                crossings.push(t);
                t_cur = t;
                cur = ij;
            }
            None => break,
        }
    }
    crossings
}

/// Even, `2*phi0`-periodic profile agreeing with `cos` on
/// `[-phi0, phi0]`; continuous across the fold.
#[derive(Clone, Copy, Debug)]
pub struct BavardProfile {
    phi0: f64,
}

impl BavardProfile {
    /// Requires `0 < phi0 < pi/2`.
    pub fn new(phi0: f64) -> Result<Self> {
        if !(phi0 > 0.0 && phi0 < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "profile fold must satisfy 0 < phi0 < pi/2, got {phi0}"
            )));
        }
        Ok(BavardProfile { phi0 })
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Fold `phi` into `[-phi0, phi0]` by periodicity.
    pub fn fold(&self, phi: f64) -> f64 {
        let period = 2.0 * self.phi0;
        phi - period * (phi / period).round()
    }

    /// Profile value `f(phi) = cos(fold(phi))`.
    pub fn f(&self, phi: f64) -> f64 {
        self.fold(phi).cos()
    }

    /// Integral of `f` over `[0, span]` (piecewise closed form).
    pub fn integral(&self, span: f64) -> f64 {
        let period = 2.0 * self.phi0;
        let per_period = 2.0 * self.phi0.sin();
        let whole = (span / period).floor();
        let rest = span - whole * period;
        let tail = if rest <= self.phi0 {
            // f = cos(phi) on [0, phi0].
            rest.sin()
        } else {
            // f = cos(phi - period) on [phi0, period]; by evenness the
            // missing piece mirrors the head of the next period.
            per_period - (period - rest).sin()
        };
        whole * per_period + tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn hex(a: f64) -> Lattice2D {
        Lattice2D::new(LatticeKind::Hexagonal, a).unwrap()
    }

    fn square(a: f64) -> Lattice2D {
        Lattice2D::new(LatticeKind::Square, a).unwrap()
    }

    #[test]
    fn warp_factor_reference_values() {
        let sq = square(PI / 4.0);
        assert_relative_eq!(psi(&sq, Vec2::new(0.0, 0.0)), 1.0);
        let corner = Vec2::new(PI / 4.0, PI / 4.0);
        let expect = (PI * 2f64.sqrt() / 4.0).cos().powi(2);
        assert_relative_eq!(psi(&sq, corner), expect, max_relative = 1e-14);
        assert_relative_eq!(expect, 0.197_150_066_460_593_3, max_relative = 1e-12);

        let hx = hex(PI / 12.0);
        let vertex = Vec2::new(0.0, 2.0 * (PI / 12.0) / crate::lattice::SQRT3);
        let expect = (2.0 * (PI / 12.0) / crate::lattice::SQRT3).cos().powi(2);
        assert_relative_eq!(psi(&hx, vertex), expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 0.911_364_828_560_027_2, max_relative = 1e-12);
    }

    #[test]
    fn rejects_degenerate_specs() {
        // Square circumradius a*sqrt(2) reaches pi/2 at a = pi/(2 sqrt 2).
        let too_big = square(1.2);
        assert!(matches!(
            MetricSpec::singular(too_big, 2.0 * PI),
            Err(Error::CellTooLarge { .. })
        ));
        assert!(MetricSpec::singular(square(0.5), 0.0).is_err());
        let dep = [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        assert!(MetricSpec::flat(dep).is_err());
    }

    #[test]
    fn polyline_validation() {
        assert!(Polyline3::new(vec![Vec3::new(0.0, 0.0, 0.0)]).is_err());
        assert!(Polyline3::new(vec![Vec3::default(), Vec3::default()]).is_err());
        assert!(Polyline3::new(vec![Vec3::default(), Vec3::new(f64::NAN, 0.0, 0.0)]).is_err());
        assert!(Polyline3::new(vec![Vec3::default(), Vec3::new(1.0, 0.0, 0.0)]).is_ok());
    }

    #[test]
    fn vertical_lines_have_cosine_weighted_length() {
        let a = PI / 4.0;
        let spec = MetricSpec::singular(square(a), 2.0 * PI).unwrap();
        // Above a cell corner the warp factor is constant along z.
        let corner = Vec3::new(a, a, 0.0);
        let top = Vec3::new(a, a, 2.0 * PI);
        let len = curve_length(&Polyline3::segment(corner, top).unwrap(), &spec);
        assert_relative_eq!(len, 2.0 * PI * (a * 2f64.sqrt()).cos(), max_relative = 1e-12);
        assert_relative_eq!(len, 2.789_833_804_092_660_2, max_relative = 1e-10);
        // Above a centre the metric is a product.
        let len = curve_length(
            &Polyline3::segment(Vec3::default(), Vec3::new(0.0, 0.0, 2.0 * PI)).unwrap(),
            &spec,
        );
        assert_relative_eq!(len, 2.0 * PI, max_relative = 1e-13);
    }

    #[test]
    fn horizontal_lines_are_euclidean() {
        let spec = MetricSpec::singular(hex(0.8), 2.0 * PI).unwrap();
        let p = Vec3::new(-2.3, 0.4, 1.0);
        let q = Vec3::new(3.1, -0.9, 1.0);
        let len = curve_length(&Polyline3::segment(p, q).unwrap(), &spec);
        assert_relative_eq!(len, (q - p).norm(), max_relative = 1e-14);
    }

    #[test]
    fn crossings_split_at_walls() {
        let a = 0.5;
        let lat = square(a);
        // From the centre of cell (0,0) to the centre of cell (1,0):
        // one wall at x = a, i.e. t = 1/2.
        let ts = wall_crossings(Vec2::new(0.0, 0.1), Vec2::new(2.0 * a, 0.1), &lat);
        assert_eq!(ts.len(), 1);
        assert_relative_eq!(ts[0], 0.5, epsilon = 1e-12);
        // A long diagonal crosses several walls in increasing order.
        let ts = wall_crossings(Vec2::new(-1.3, -0.9), Vec2::new(1.7, 1.1), &lat);
        assert!(ts.len() >= 3);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn refinement_does_not_change_lengths() {
        let spec = MetricSpec::singular(hex(0.7), 2.0 * PI).unwrap();
        let p = Vec3::new(-1.9, -0.8, 0.3);
        let q = Vec3::new(2.2, 1.4, 5.9);
        let coarse = curve_length(&Polyline3::segment(p, q).unwrap(), &spec);
        // Same straight curve described by many collinear points.
        let n = 97;
        let pts: Vec<Vec3> = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                p + (q - p) * t
            })
            .collect();
        let fine = curve_length(&Polyline3::new(pts).unwrap(), &spec);
        assert_relative_eq!(coarse, fine, max_relative = 1e-11);
    }

    #[test]
    fn flat_lengths_are_euclidean() {
        let spec = MetricSpec::flat([
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 3.0, 0.0),
            Vec3::new(0.0, 0.0, 4.0),
        ])
        .unwrap();
        let p = Vec3::new(0.3, -0.2, 0.9);
        let q = Vec3::new(-1.0, 2.0, 3.0);
        assert_relative_eq!(
            curve_length(&Polyline3::segment(p, q).unwrap(), &spec),
            (q - p).norm()
        );
        let g = spec.metric_tensor(p);
        assert_eq!(g[0][0], 4.0);
        assert_eq!(g[1][1], 9.0);
        assert_eq!(g[2][2], 16.0);
        assert_eq!(g[0][1], 0.0);
    }

    #[test]
    fn profile_reference_values() {
        let b = BavardProfile::new(PI / 4.0).unwrap();
        assert_relative_eq!(b.f(0.0), 1.0);
        assert_relative_eq!(b.f(PI / 2.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(b.f(PI / 4.0), (PI / 4.0).cos(), max_relative = 1e-15);
        // Continuity across the fold.
        let eps = 1e-9;
        assert_relative_eq!(b.f(PI / 4.0 - eps), b.f(PI / 4.0 + eps), epsilon = 1e-8);
        // Evenness and periodicity.
        assert_relative_eq!(b.f(0.3), b.f(-0.3));
        assert_relative_eq!(b.f(0.3), b.f(0.3 + PI), max_relative = 1e-12);
        assert!(BavardProfile::new(0.0).is_err());
        assert!(BavardProfile::new(PI / 2.0).is_err());
    }

    #[test]
    fn profile_integral_matches_quadrature() {
        let b = BavardProfile::new(PI / 4.0).unwrap();
        for span in [0.2, PI / 4.0, 1.0, PI, 2.9, 4.0 * (PI / 4.0)] {
            let n = 40_000;
            let h = span / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                s += b.f((i as f64 + 0.5) * h) * h;
            }
            assert_relative_eq!(b.integral(span), s, epsilon = 1e-6);
        }
        assert_relative_eq!(b.integral(PI), 2.0 * 2f64.sqrt(), max_relative = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn length_dominates_coordinate_projections(
            a in 0.3f64..0.8,
            coords in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -4.0f64..4.0), 2..6),
        ) {
            let lat = hex(a);
            let spec = MetricSpec::singular(lat.clone(), 2.0 * PI).unwrap();
            let pts: Vec<Vec3> = coords.iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect();
            prop_assume!(pts.windows(2).all(|w| w[0] != w[1]));
            let poly = Polyline3::new(pts.clone()).unwrap();
            let len = curve_length(&poly, &spec);
            let first = pts[0];
            let last = pts[pts.len() - 1];
            prop_assert!(len + 1e-9 >= (last.x - first.x).abs());
            prop_assert!(len + 1e-9 >= (last.y - first.y).abs());
            let min_speed = lat.circumradius().cos();
            prop_assert!(len + 1e-9 >= min_speed * (last.z - first.z).abs());
        }

        #[test]
        fn length_invariant_under_lattice_translation(
            a in 0.3f64..0.8,
            i in -2i64..3,
            j in -2i64..3,
            seg in ((-1.5f64..1.5), (-1.5f64..1.5), (0.0f64..2.0), (-1.5f64..1.5), (-1.5f64..1.5), (0.0f64..2.0)),
        ) {
            let lat = square(a);
            let spec = MetricSpec::singular(lat.clone(), 2.0 * PI).unwrap();
            let (x0, y0, z0, x1, y1, z1) = seg;
            let p = Vec3::new(x0, y0, z0);
            let q = Vec3::new(x1, y1, z1);
            prop_assume!(p != q);
            let t = lat.center(i, j);
            let shift = Vec3::new(t.x, t.y, 0.37);
            let l0 = curve_length(&Polyline3::segment(p, q).unwrap(), &spec);
            let l1 = curve_length(&Polyline3::segment(p + shift, q + shift).unwrap(), &spec);
            prop_assert!((l0 - l1).abs() < 1e-9 * (1.0 + l0));
        }
    }
}

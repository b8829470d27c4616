//! Volumes of the flat and warped quotients.
//!
//! The warped volume element is `cos(dist((x,y), lattice)) dx dy dz`,
//! so everything reduces to one planar integral over the Voronoi cell.
//! The cell splits into congruent right triangles around the centre; in
//! polar coordinates the radial factor has the closed form
//! `int_0^R r cos r dr = R sin R + cos R - 1`, leaving a single smooth
//! angular integral evaluated adaptively.

use crate::error::{Error, Result};
use crate::groups::QuotientSpec;
use crate::lattice::{Lattice2D, LatticeKind};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Value with an error estimate from the quadrature rule.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub estimated_error: f64,
}

/// Volume of a quotient manifold.
#[derive(Clone, Copy, Debug)]
pub struct VolumeResult {
    pub value: f64,
    pub estimated_error: f64,
    /// Planar cell integral behind the value (warped metrics only).
    pub cell_integral: Option<f64>,
}

/// `int_0^R r cos r dr`.
fn radial_closed_form(r: f64) -> f64 {
    r * r.sin() + r.cos() - 1.0
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    depth: u32,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        (left + right + diff / 15.0, diff.abs() / 15.0)
    } else {
        let (lv, le) = adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1);
        let (rv, re) = adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
        (lv + rv, le + re)
    }
}

/// `int_D cos(dist(p, centre)) dA` over one Voronoi cell.
///
/// Requires the cell circumradius below pi/2 (positive integrand).
pub fn cell_integral(lat: &Lattice2D) -> Result<Quadrature> {
    if lat.circumradius() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::CellTooLarge {
            radius: lat.circumradius(),
        });
    }
    let sides = match lat.kind() {
        LatticeKind::Square => 4.0,
        LatticeKind::Hexagonal => 6.0,
    };
    let half_angle = std::f64::consts::PI / sides;
    let a = lat.apothem();
    // One triangle spans angles [0, half_angle] with the cell edge at
    // r = a / cos(theta); the cell is 2 * sides congruent copies.
    let f = |theta: f64| radial_closed_form(a / theta.cos());
    let fa = f(0.0);
    let fm = f(0.5 * half_angle);
    let fb = f(half_angle);
    let (value, err) = adaptive_simpson(&f, 0.0, half_angle, fa, fm, fb, 5e-13, 30);
    Ok(Quadrature {
        value: 2.0 * sides * value,
        estimated_error: 2.0 * sides * err,
    })
}

/// Volume of the quotient: covering-torus volume over the deck order.
///
/// The warped torus covers `vertical_period` in height and four Voronoi
/// cells in the plane (its horizontal lattice is the doubled one); the
/// flat torus volume is the determinant of the translation basis.
pub fn manifold_volume(spec: &QuotientSpec) -> Result<VolumeResult> {
    let order = spec.order() as f64;
    match spec.metric() {
        crate::metric::MetricSpec::Singular { .. } => {
            let lat = spec.lattice().expect("singular metric carries a lattice");
            let vp = spec
                .metric()
                .vertical_period()
                .expect("singular metric has a period");
            let cell = cell_integral(lat)?;
            Ok(VolumeResult {
                value: vp * 4.0 * cell.value / order,
                estimated_error: vp * 4.0 * cell.estimated_error / order,
                cell_integral: Some(cell.value),
            })
        }
        crate::metric::MetricSpec::Flat { basis } => {
            let det = basis[0].dot(basis[1].cross(basis[2])).abs();
            Ok(VolumeResult {
                value: det / order,
                estimated_error: 0.0,
                cell_integral: None,
            })
        }
    }
}

/// Monte-Carlo estimate of the cell integral with its standard error.
/// Deterministic for a fixed seed; used as an independent cross-check.
pub fn monte_carlo_cell_integral(lat: &Lattice2D, samples: u64, seed: u64) -> (f64, f64) {
    let r = lat.circumradius();
    let box_area = 4.0 * r * r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let x = rng.gen_range(-r..r);
        let y = rng.gen_range(-r..r);
        let p = crate::geom::Vec2::new(x, y);
        let (_, ij) = lat.nearest_center(p);
        let v = if ij == (0, 0) { p.norm().cos() } else { 0.0 };
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (box_area * mean, box_area * (var / n).sqrt())
}

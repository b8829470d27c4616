//! Stability of the vertical axis curves that close up under the
//! one-third-turn screw.
//!
//! Over a cone line the metric is `dr^2 + r^2 dphi^2 + cos^2(r) dz^2`,
//! so normal planes along the axis have curvature one and normal
//! variation fields obey the oscillator equation `f'' + f = 0`.  A
//! curve of length `c` must close with its normal frame rotated by the
//! screw angle, which pins down the field up to scale.  The index form
//! of that field decides stability: it is positive for short curves,
//! has its first zero exactly at the screw angle, and is negative
//! beyond it.  A finite-difference probe of actual curve lengths
//! cross-checks the closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::lattice::{Lattice2D, LatticeKind};
use crate::metric::{curve_length, MetricSpec, Polyline3};

/// Rotation the screw applies per vertical period: a third of a turn.
pub const TWIST: f64 = 2.0 * PI / 3.0;

/// Panels in the finite-difference polylines.
const FD_PANELS: usize = 128;

/// Sample count of the reported field profile.
const PROFILE_SAMPLES: usize = 65;

fn check_length(c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0 && c < PI) {
        return Err(Error::InvalidParameter(format!(
            "curve length must lie in (0, pi), got {c}"
        )));
    }
    Ok(())
}

/// Normal variation field along an axis curve of length `c`, scaled so
/// its index form matches `index_form`.
///
/// The components are taken in a parallel frame; the field starts
/// radially (`f1(0) = 1`, `f2(0) = 0`) and ends rotated by the screw
/// angle.
#[derive(Clone, Copy, Debug)]
pub struct JacobiFields {
    c: f64,
    slope: f64,
    amplitude: f64,
}

impl JacobiFields {
    pub fn new(c: f64) -> Result<Self> {
        check_length(c)?;
        let a = TWIST.cos();
        Ok(JacobiFields {
            c,
            slope: (a - c.cos()) / c.sin(),
            // Scale chosen so the boundary pairing of the field equals
            // the closed-form index value.
            amplitude: (c.sin() * (1.0 + a * c.cos()) / 2.0).abs().sqrt(),
        })
    }

    pub fn length(&self) -> f64 {
        self.c
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn f1(&self, s: f64) -> f64 {
        s.cos() + self.slope * s.sin()
    }

    pub fn f2(&self, s: f64) -> f64 {
        TWIST.sin() / self.c.sin() * s.sin()
    }

    pub fn f1_prime(&self, s: f64) -> f64 {
        -s.sin() + self.slope * s.cos()
    }

    pub fn f2_prime(&self, s: f64) -> f64 {
        TWIST.sin() / self.c.sin() * s.cos()
    }

    /// Index form of the field evaluated through its boundary pairing
    /// `<f', f>` at the endpoints, including the amplitude scaling.
    pub fn boundary_form(&self) -> f64 {
        let c = self.c;
        let end = self.f1(c) * self.f1_prime(c) + self.f2(c) * self.f2_prime(c);
        let start = self.f1(0.0) * self.f1_prime(0.0) + self.f2(0.0) * self.f2_prime(0.0);
        self.amplitude * self.amplitude * (end - start)
    }
}

/// One sample of the variation field profile.
#[derive(Clone, Copy, Debug)]
pub struct FieldSample {
    /// Arclength along the axis curve.
    pub s: f64,
    /// Radial component (direction of the field at the start).
    pub radial: f64,
    /// Component a quarter turn ahead.
    pub tangential: f64,
}

/// Closed-form index value together with the field that realises it.
#[derive(Clone, Debug)]
pub struct IndexProfile {
    /// Second variation of length along the pinned field.
    pub value: f64,
    /// Length of the axis curve.
    pub length: f64,
    /// Rotation the closure imposes on the normal frame.
    pub twist: f64,
    /// Unscaled field profile along the curve.
    pub samples: Vec<FieldSample>,
}

/// Index form of the screw-closed axis curve of length `c`.
///
/// Zero exactly when `c` equals the screw angle: the value is computed
/// so the cancellation at that length is exact in floating point.
pub fn index_form(c: f64) -> Result<IndexProfile> {
    check_length(c)?;
    let a = TWIST.cos();
    let sin2 = TWIST.sin() * TWIST.sin();
    let cc = c.cos();
    let value = sin2 * (cc - a) + a * (cc * cc - a * a);
    let fields = JacobiFields::new(c)?;
    let samples = (0..PROFILE_SAMPLES)
        .map(|i| {
            let s = c * i as f64 / (PROFILE_SAMPLES - 1) as f64;
            FieldSample {
                s,
                radial: fields.f1(s),
                tangential: fields.f2(s),
            }
        })
        .collect();
    Ok(IndexProfile {
        value,
        length: c,
        twist: TWIST,
        samples,
    })
}

/// Finite-difference second variation of curve length.
#[derive(Clone, Copy, Debug)]
pub struct FdSecondVariation {
    /// Central second difference of length over the step.
    pub value: f64,
    /// Absolute displacement parameter used.
    pub step: f64,
    /// Field scale factor, matching `index_form`.
    pub amplitude: f64,
    /// Measured lengths at `-step`, `0`, `+step`.
    pub lengths: [f64; 3],
}

/// Measures the second variation by displacing the axis curve along
/// the pinned field and measuring actual curve lengths.
///
/// The displaced curves live near a cone line of a reference singular
/// metric; the displacement must stay inside the region where the warp
/// is a function of the distance to that one line.  `relative_step`
/// scales the displacement as a fraction of `c` (default `1e-3`).
pub fn second_variation_fd(c: f64, relative_step: Option<f64>) -> Result<FdSecondVariation> {
    check_length(c)?;
    let rel = relative_step.unwrap_or(1e-3);
    if !(rel.is_finite() && rel > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step fraction must be positive, got {rel}"
        )));
    }
    let t = rel * c;
    let fields = JacobiFields::new(c)?;

    // Reference metric: a cell wide enough that the displaced curves
    // stay in the radially symmetric neighbourhood of its axis.
    let lat = Lattice2D::new(LatticeKind::Square, 1.0)?;
    let reach = lat.apothem() * 0.9;
    let spec = MetricSpec::singular(lat, 2.0 * PI)?;

    let curve = |amp: f64| -> Result<f64> {
        let mut pts = Vec::with_capacity(FD_PANELS + 1);
        for i in 0..=FD_PANELS {
            let s = c * i as f64 / FD_PANELS as f64;
            let r1 = amp * fields.f1(s);
            let r2 = amp * fields.f2(s);
            if r1.hypot(r2) > reach {
                return Err(Error::RegionTooSmall(format!(
                    "displacement {:.3} leaves the symmetric neighbourhood of the axis",
                    r1.hypot(r2)
                )));
            }
            pts.push(Vec3::new(r1, r2, s));
        }
        Ok(curve_length(&Polyline3::new(pts)?, &spec))
    };

    let amp = t * fields.amplitude;
    let minus = curve(-amp)?;
    let base = curve(0.0)?;
    let plus = curve(amp)?;
    Ok(FdSecondVariation {
        value: (plus - 2.0 * base + minus) / (t * t),
        step: t,
        amplitude: fields.amplitude,
        lengths: [minus, base, plus],
    })
}

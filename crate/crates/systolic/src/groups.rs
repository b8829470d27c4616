//! Generators of the torsion-free crystallographic groups behind the
//! six orientable flat 3-manifold types, their screw motions on the
//! warped tori, group algebra, and numerical verification helpers
//! (isometry checks, word enumeration, invariant vertical axes).
//!
//! Linear parts live in a finite catalogue: rotations about the z-axis
//! by multiples of 30 degrees, optionally composed with a reflection of
//! the y-coordinate and a sign flip of z.  That set is closed under
//! composition and is stored symbolically, so arbitrarily long words
//! keep exact orthogonal parts; only translations accumulate rounding.

use crate::error::{Error, Result};
use crate::geom::{Vec2, Vec3};
use crate::lattice::{Lattice2D, LatticeKind, SQRT3};
use crate::metric::{curve_length, MetricSpec, Polyline3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// cos(k pi / 6) for k = 0..11.
const COS_TABLE: [f64; 12] = [
    1.0,
    SQRT3 / 2.0,
    0.5,
    0.0,
    -0.5,
    -SQRT3 / 2.0,
    -1.0,
    -SQRT3 / 2.0,
    -0.5,
    0.0,
    0.5,
    SQRT3 / 2.0,
];

/// sin(k pi / 6) for k = 0..11.
const SIN_TABLE: [f64; 12] = [
    0.0,
    0.5,
    SQRT3 / 2.0,
    1.0,
    SQRT3 / 2.0,
    0.5,
    0.0,
    -0.5,
    -SQRT3 / 2.0,
    -1.0,
    -SQRT3 / 2.0,
    -0.5,
];

/// Orthogonal part of a rigid motion, stored symbolically as
/// `R(k pi/6) * (mirror ? diag(1,-1) : I)` on the xy-plane together
/// with the sign of the z-action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearPart {
    rot12: u8,
    mirror: bool,
    z_flip: bool,
}

impl LinearPart {
    pub fn identity() -> Self {
        LinearPart {
            rot12: 0,
            mirror: false,
            z_flip: false,
        }
    }

    /// Rotation about the z-axis by `k * 30` degrees.
    pub fn rotation_z(k: i64) -> Self {
        LinearPart {
            rot12: k.rem_euclid(12) as u8,
            mirror: false,
            z_flip: false,
        }
    }

    /// Rotation by pi about the x-axis: `(x, y, z) -> (x, -y, -z)`.
    pub fn rotation_x_pi() -> Self {
        LinearPart {
            rot12: 0,
            mirror: true,
            z_flip: true,
        }
    }

    /// Rotation by pi about the y-axis: `(x, y, z) -> (-x, y, -z)`.
    pub fn rotation_y_pi() -> Self {
        LinearPart {
            rot12: 6,
            mirror: true,
            z_flip: true,
        }
    }

    /// Reflection `(x, y, z) -> (-x, y, z)`.
    pub fn reflection_x() -> Self {
        LinearPart {
            rot12: 6,
            mirror: true,
            z_flip: false,
        }
    }

    /// Reflection `(x, y, z) -> (x, -y, z)`.
    pub fn reflection_y() -> Self {
        LinearPart {
            rot12: 0,
            mirror: true,
            z_flip: false,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == LinearPart::identity()
    }

    /// Index of the z-rotation angle in units of 30 degrees.
    pub fn rotation_steps(&self) -> u8 {
        self.rot12
    }

    pub fn det(&self) -> f64 {
        let m = if self.mirror { -1.0 } else { 1.0 };
        let z = if self.z_flip { -1.0 } else { 1.0 };
        m * z
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        let y = if self.mirror { -p.y } else { p.y };
        let c = COS_TABLE[self.rot12 as usize];
        let s = SIN_TABLE[self.rot12 as usize];
        Vec3::new(
            c * p.x - s * y,
            s * p.x + c * y,
            if self.z_flip { -p.z } else { p.z },
        )
    }

    pub fn apply_xy(&self, p: Vec2) -> Vec2 {
        let q = self.apply(Vec3::new(p.x, p.y, 0.0));
        q.xy()
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &LinearPart) -> LinearPart {
        // diag(1,-1) conjugates R(k) to R(-k).
        let k2 = if self.mirror {
            (12 - other.rot12) % 12
        } else {
            other.rot12
        };
        LinearPart {
            rot12: (self.rot12 + k2) % 12,
            mirror: self.mirror ^ other.mirror,
            z_flip: self.z_flip ^ other.z_flip,
        }
    }

    pub fn inverse(&self) -> LinearPart {
        if self.mirror {
            // Reflections in the catalogue are involutions.
            *self
        } else {
            LinearPart {
                rot12: (12 - self.rot12) % 12,
                ..*self
            }
        }
    }

    /// Column-major 3x3 matrix.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let cols = [
            self.apply(Vec3::new(1.0, 0.0, 0.0)),
            self.apply(Vec3::new(0.0, 1.0, 0.0)),
            self.apply(Vec3::new(0.0, 0.0, 1.0)),
        ];
        let mut m = [[0.0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            m[0][j] = col.x;
            m[1][j] = col.y;
            m[2][j] = col.z;
        }
        m
    }
}

/// Rigid motion `p -> linear(p) + translation`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry3 {
    pub linear: LinearPart,
    pub translation: Vec3,
}

impl Isometry3 {
    pub fn new(linear: LinearPart, translation: Vec3) -> Self {
        Isometry3 {
            linear,
            translation,
        }
    }

    pub fn identity() -> Self {
        Isometry3::new(LinearPart::identity(), Vec3::default())
    }

    pub fn from_translation(v: Vec3) -> Self {
        Isometry3::new(LinearPart::identity(), v)
    }

    /// Screw motion about the z-axis: rotation by `k * 30` degrees plus
    /// a vertical rise.
    pub fn screw_z(k: i64, rise: f64) -> Self {
        Isometry3::new(LinearPart::rotation_z(k), Vec3::new(0.0, 0.0, rise))
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.linear.apply(p) + self.translation
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Isometry3) -> Isometry3 {
        Isometry3 {
            linear: self.linear.compose(&other.linear),
            translation: self.linear.apply(other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Isometry3 {
        let inv = self.linear.inverse();
        Isometry3 {
            linear: inv,
            translation: inv.apply(self.translation) * -1.0,
        }
    }

    pub fn pow(&self, n: u32) -> Isometry3 {
        let mut out = Isometry3::identity();
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    pub fn is_pure_translation(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn approx_eq(&self, other: &Isometry3, tol: f64) -> bool {
        self.linear == other.linear && (self.translation - other.translation).norm() <= tol
    }

    /// Image of a polyline, point by point.
    pub fn map_polyline(&self, poly: &Polyline3) -> Polyline3 {
        let pts = poly.points().iter().map(|&p| self.apply(p)).collect();
        Polyline3::new(pts).expect("isometries preserve polyline validity")
    }

    fn dedup_key(&self) -> (u8, bool, bool, i64, i64, i64) {
        let q = |x: f64| (x * 1e9).round() as i64;
        (
            self.linear.rot12,
            self.linear.mirror,
            self.linear.z_flip,
            q(self.translation.x),
            q(self.translation.y),
            q(self.translation.z),
        )
    }
}

/// The six orientable flat 3-manifold types, labelled by holonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldType {
    C1,
    C2,
    C3,
    C4,
    C6,
    C22,
}

impl ManifoldType {
    pub const ALL: [ManifoldType; 6] = [
        ManifoldType::C1,
        ManifoldType::C2,
        ManifoldType::C3,
        ManifoldType::C4,
        ManifoldType::C6,
        ManifoldType::C22,
    ];

    /// Order of the holonomy group.
    pub fn holonomy_order(&self) -> u32 {
        match self {
            ManifoldType::C1 => 1,
            ManifoldType::C2 => 2,
            ManifoldType::C3 => 3,
            ManifoldType::C4 => 4,
            ManifoldType::C6 => 6,
            ManifoldType::C22 => 4,
        }
    }

    /// Order of the vertical screw motion, for the cyclic types.
    pub fn screw_order(&self) -> Option<u32> {
        match self {
            ManifoldType::C2 => Some(2),
            ManifoldType::C3 => Some(3),
            ManifoldType::C4 => Some(4),
            ManifoldType::C6 => Some(6),
            ManifoldType::C1 | ManifoldType::C22 => None,
        }
    }

    /// Screw rotation angle in 30-degree steps.
    pub fn screw_steps(&self) -> Option<i64> {
        self.screw_order().map(|n| 12 / n as i64)
    }

    /// Planar lattice kind forced by the holonomy, if any.
    pub fn required_kind(&self) -> Option<LatticeKind> {
        match self {
            ManifoldType::C4 => Some(LatticeKind::Square),
            ManifoldType::C3 | ManifoldType::C6 => Some(LatticeKind::Hexagonal),
            _ => None,
        }
    }

    /// Whether the warped-metric construction applies to this type.
    pub fn supports_singular(&self) -> bool {
        !matches!(self, ManifoldType::C22)
    }
}

impl fmt::Display for ManifoldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ManifoldType::C1 => "C1",
            ManifoldType::C2 => "C2",
            ManifoldType::C3 => "C3",
            ManifoldType::C4 => "C4",
            ManifoldType::C6 => "C6",
            ManifoldType::C22 => "C22",
        };
        f.write_str(s)
    }
}

impl FromStr for ManifoldType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(ManifoldType::C1),
            "c2" => Ok(ManifoldType::C2),
            "c3" => Ok(ManifoldType::C3),
            "c4" => Ok(ManifoldType::C4),
            "c6" => Ok(ManifoldType::C6),
            "c22" | "c2,2" | "c2x2" => Ok(ManifoldType::C22),
            _ => Err(Error::InvalidParameter(format!(
                "unknown manifold type {s:?} (expected C1, C2, C3, C4, C6 or C22)"
            ))),
        }
    }
}

/// Parameters needed to write down a generating set.
#[derive(Clone, Debug)]
pub enum GroupParams {
    /// Translation basis of the flat model; screw types need the first
    /// two vectors planar and the third vertical.
    Flat { basis: [Vec3; 3] },
    /// Warped torus over a planar lattice of scale `a` with the given
    /// vertical period.
    Singular {
        kind: LatticeKind,
        a: f64,
        vertical_period: f64,
    },
}

const ALIGN_TOL: f64 = 1e-9;

fn validate_flat_basis(manifold_type: ManifoldType, basis: &[Vec3; 3]) -> Result<()> {
    let [a1, a2, a3] = *basis;
    let det = a1.dot(a2.cross(a3));
    if !det.is_finite() || det.abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "flat basis must be linearly independent".into(),
        ));
    }
    if manifold_type == ManifoldType::C1 {
        return Ok(());
    }
    if a1.z.abs() > ALIGN_TOL || a2.z.abs() > ALIGN_TOL {
        return Err(Error::IncompatibleGeometry(
            "first two basis vectors must be horizontal".into(),
        ));
    }
    if a3.x.abs() > ALIGN_TOL || a3.y.abs() > ALIGN_TOL {
        return Err(Error::IncompatibleGeometry(
            "third basis vector must be vertical".into(),
        ));
    }
    let n1 = a1.norm();
    let n2 = a2.norm();
    let dot = a1.dot(a2);
    match manifold_type {
        ManifoldType::C2 => Ok(()),
        ManifoldType::C4 => {
            if (n1 - n2).abs() > ALIGN_TOL * n1 || dot.abs() > ALIGN_TOL * n1 * n2 {
                return Err(Error::IncompatibleGeometry(
                    "holonomy of order 4 needs a square planar lattice".into(),
                ));
            }
            Ok(())
        }
        ManifoldType::C3 | ManifoldType::C6 => {
            if (n1 - n2).abs() > ALIGN_TOL * n1
                || (dot.abs() - 0.5 * n1 * n2).abs() > ALIGN_TOL * n1 * n2
            {
                return Err(Error::IncompatibleGeometry(
                    "holonomy of order 3 or 6 needs a hexagonal planar lattice".into(),
                ));
            }
            Ok(())
        }
        ManifoldType::C22 => {
            let axis_aligned = a1.y.abs() <= ALIGN_TOL
                && a1.z.abs() <= ALIGN_TOL
                && a2.x.abs() <= ALIGN_TOL
                && a2.z.abs() <= ALIGN_TOL;
            if !axis_aligned {
                return Err(Error::IncompatibleGeometry(
                    "the three half-turn axes must be the coordinate axes".into(),
                ));
            }
            Ok(())
        }
        ManifoldType::C1 => unreachable!(),
    }
}

/// Generating set of the fundamental group for `manifold_type`.
///
/// Cyclic types give the vertical screw motion followed by the two
/// horizontal translations; the order-(2,2) type gives its three
/// half-turn screws; the torus gives three translations.
pub fn generators(manifold_type: ManifoldType, params: &GroupParams) -> Result<Vec<Isometry3>> {
    match params {
        GroupParams::Flat { basis } => {
            validate_flat_basis(manifold_type, basis)?;
            let [a1, a2, a3] = *basis;
            match manifold_type {
                ManifoldType::C1 => Ok(vec![
                    Isometry3::from_translation(a1),
                    Isometry3::from_translation(a2),
                    Isometry3::from_translation(a3),
                ]),
                ManifoldType::C22 => Ok(vec![
                    Isometry3::new(LinearPart::rotation_x_pi(), a1 * 0.5),
                    Isometry3::new(LinearPart::rotation_y_pi(), (a1 + a2) * 0.5),
                    Isometry3::new(LinearPart::rotation_z(6), (a1 + a2 + a3) * 0.5),
                ]),
                _ => {
                    let n = manifold_type.screw_order().unwrap() as f64;
                    let steps = manifold_type.screw_steps().unwrap();
                    let screw = Isometry3::new(LinearPart::rotation_z(steps), a3 * (1.0 / n));
                    Ok(vec![
                        screw,
                        Isometry3::from_translation(a1),
                        Isometry3::from_translation(a2),
                    ])
                }
            }
        }
        GroupParams::Singular {
            kind,
            a,
            vertical_period,
        } => {
            if !manifold_type.supports_singular() {
                return Err(Error::Unsupported(
                    "no warped metric exists for the order-(2,2) type".into(),
                ));
            }
            if let Some(required) = manifold_type.required_kind() {
                if *kind != required {
                    return Err(Error::IncompatibleGeometry(format!(
                        "{manifold_type} needs a {required} lattice, got {kind}"
                    )));
                }
            }
            let lat = Lattice2D::new(*kind, *a)?;
            let vp = *vertical_period;
            if !(vp.is_finite() && vp > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "vertical period must be positive, got {vp}"
                )));
            }
            let [b1, b2] = lat.basis();
            // The torus quotients by the doubled planar lattice.
            let h1 = Vec3::new(2.0 * b1.x, 2.0 * b1.y, 0.0);
            let h2 = Vec3::new(2.0 * b2.x, 2.0 * b2.y, 0.0);
            match manifold_type {
                ManifoldType::C1 => Ok(vec![
                    Isometry3::from_translation(h1),
                    Isometry3::from_translation(h2),
                    Isometry3::from_translation(Vec3::new(0.0, 0.0, vp)),
                ]),
                _ => {
                    let n = manifold_type.screw_order().unwrap() as f64;
                    let steps = manifold_type.screw_steps().unwrap();
                    let screw = Isometry3::screw_z(steps, vp / n);
                    Ok(vec![
                        screw,
                        Isometry3::from_translation(h1),
                        Isometry3::from_translation(h2),
                    ])
                }
            }
        }
    }
}

/// A compact quotient: metric on the cover, generating set of the deck
/// group, and the translation lattice of the covering torus.
#[derive(Clone, Debug)]
pub struct QuotientSpec {
    manifold_type: ManifoldType,
    metric: MetricSpec,
    generators: Vec<Isometry3>,
    deck_generator: Option<Isometry3>,
    order: u32,
    torus_translations: [Vec3; 3],
}

impl QuotientSpec {
    /// Quotient of the warped torus by the screw motion of the given
    /// type (a plain warped torus for the trivial holonomy).
    pub fn singular(
        manifold_type: ManifoldType,
        kind: LatticeKind,
        a: f64,
        vertical_period: f64,
    ) -> Result<Self> {
        let params = GroupParams::Singular {
            kind,
            a,
            vertical_period,
        };
        let gens = generators(manifold_type, &params)?;
        let lat = Lattice2D::new(kind, a)?;
        let metric = MetricSpec::singular(lat.clone(), vertical_period)?;
        let [b1, b2] = lat.basis();
        let torus_translations = [
            Vec3::new(2.0 * b1.x, 2.0 * b1.y, 0.0),
            Vec3::new(2.0 * b2.x, 2.0 * b2.y, 0.0),
            Vec3::new(0.0, 0.0, vertical_period),
        ];
        let deck_generator = match manifold_type {
            ManifoldType::C1 => None,
            _ => Some(gens[0]),
        };
        Ok(QuotientSpec {
            manifold_type,
            metric,
            generators: gens,
            deck_generator,
            order: manifold_type.holonomy_order(),
            torus_translations,
        })
    }

    /// Flat quotient with the given translation basis.
    pub fn flat(manifold_type: ManifoldType, basis: [Vec3; 3]) -> Result<Self> {
        let params = GroupParams::Flat { basis };
        let gens = generators(manifold_type, &params)?;
        let metric = MetricSpec::flat(basis)?;
        let deck_generator = match manifold_type {
            ManifoldType::C1 => None,
            _ => Some(gens[0]),
        };
        Ok(QuotientSpec {
            manifold_type,
            metric,
            generators: gens,
            deck_generator,
            order: manifold_type.holonomy_order(),
            torus_translations: basis,
        })
    }

    pub fn manifold_type(&self) -> ManifoldType {
        self.manifold_type
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn generators(&self) -> &[Isometry3] {
        &self.generators
    }

    pub fn deck_generator(&self) -> Option<&Isometry3> {
        self.deck_generator.as_ref()
    }

    /// `k`-th power of the screw motion.
    pub fn deck_power(&self, k: u32) -> Result<Isometry3> {
        let g = self.deck_generator.ok_or_else(|| {
            Error::Unsupported("the torus has no distinguished deck generator".into())
        })?;
        Ok(g.pow(k))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Basis of the translation lattice of the covering torus.
    pub fn torus_translations(&self) -> [Vec3; 3] {
        self.torus_translations
    }

    pub fn lattice(&self) -> Option<&Lattice2D> {
        self.metric.lattice()
    }
}

/// Result of the sampled isometry test.
#[derive(Clone, Copy, Debug)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    pub max_deviation: f64,
}

const ISOMETRY_TOL: f64 = 1e-9;

/// Compare lengths of random short segments with their images under
/// `g`.  Deterministic: the sample sequence is fixed.
pub fn is_metric_isometry(
    g: &Isometry3,
    spec: &MetricSpec,
    n_samples: usize,
) -> Result<IsometryCheck> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter(
            "isometry check needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0150_3e7b);
    let mut max_dev: f64 = 0.0;
    for _ in 0..n_samples {
        let (p, step) = match spec {
            MetricSpec::Singular {
                lattice,
                vertical_period,
            } => {
                let span = 4.0 * lattice.apothem();
                let p = Vec3::new(
                    rng.gen_range(-span..span),
                    rng.gen_range(-span..span),
                    rng.gen_range(0.0..*vertical_period),
                );
                (p, 0.3 * lattice.apothem())
            }
            MetricSpec::Flat { basis } => {
                let u = rng.gen_range(0.0..1.0);
                let v = rng.gen_range(0.0..1.0);
                let w = rng.gen_range(0.0..1.0);
                let p = basis[0] * u + basis[1] * v + basis[2] * w;
                (p, 0.3)
            }
        };
        let mut d = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if d.norm() < 1e-3 {
            d = Vec3::new(1.0, 0.0, 0.0);
        }
        let q = p + d * (step / d.norm());
        let seg = Polyline3::segment(p, q)?;
        let image = g.map_polyline(&seg);
        let dev = (curve_length(&seg, spec) - curve_length(&image, spec)).abs();
        max_dev = max_dev.max(dev);
    }
    Ok(IsometryCheck {
        is_isometry: max_dev <= ISOMETRY_TOL,
        max_deviation: max_dev,
    })
}

/// All distinct nonidentity words of length at most `max_word_length`
/// in the generators and their inverses, sorted deterministically.
pub fn deck_words(spec: &QuotientSpec, max_word_length: usize) -> Result<Vec<Isometry3>> {
    if max_word_length == 0 {
        return Err(Error::InvalidParameter(
            "word enumeration needs length >= 1".into(),
        ));
    }
    let mut letters = Vec::new();
    for g in spec.generators() {
        letters.push(*g);
        letters.push(g.inverse());
    }
    let mut seen: HashMap<(u8, bool, bool, i64, i64, i64), Isometry3> = HashMap::new();
    let identity = Isometry3::identity();
    seen.insert(identity.dedup_key(), identity);
    let mut frontier = vec![identity];
    for _ in 0..max_word_length {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let candidate = l.compose(w);
                if seen.insert(candidate.dedup_key(), candidate).is_none() {
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    let identity_key = identity.dedup_key();
    let mut words: Vec<Isometry3> = seen
        .into_iter()
        .filter(|(k, _)| *k != identity_key)
        .map(|(_, w)| w)
        .collect();
    words.sort_by_key(|w| w.dedup_key());
    Ok(words)
}

/// Base points (in the xy-plane) of the vertical axes globally
/// invariant under the `k`-th power of the screw motion, modulo the
/// horizontal translations of the covering torus.
///
/// An axis through `p` is invariant iff `(I - R^k) p` lies in the
/// horizontal translation lattice; in lattice coordinates that is an
/// integer linear system, so the number of solutions equals the
/// determinant of the reduced matrix.
pub fn invariant_axes(spec: &QuotientSpec, k: u32) -> Result<Vec<Vec2>> {
    if spec.manifold_type() == ManifoldType::C22 {
        return Err(Error::Unsupported(
            "the order-(2,2) screws have horizontal axes".into(),
        ));
    }
    if k == 0 || k >= spec.order() {
        return Err(Error::InvalidParameter(format!(
            "power must satisfy 1 <= k < {}, got {k}",
            spec.order()
        )));
    }
    let gk = spec.deck_power(k)?;
    let m = gk.linear.matrix();
    // I - R^k on the xy-plane.
    let m00 = 1.0 - m[0][0];
    let m01 = -m[0][1];
    let m10 = -m[1][0];
    let m11 = 1.0 - m[1][1];
    let det = m00 * m11 - m01 * m10;
    if det.abs() < 1e-9 {
        return Err(Error::InvalidParameter(
            "screw power acts trivially on the plane".into(),
        ));
    }
    let t = spec.torus_translations();
    let b1 = t[0].xy();
    let b2 = t[1].xy();
    let txy = Vec2::new(gk.translation.x, gk.translation.y);

    let solve = |rhs: Vec2| -> Vec2 {
        Vec2::new(
            (rhs.x * m11 - rhs.y * m01) / det,
            (rhs.y * m00 - rhs.x * m10) / det,
        )
    };
    // Difference modulo the horizontal lattice.
    let bdet = b1.x * b2.y - b1.y * b2.x;
    let fold = |p: Vec2| -> Vec2 {
        let u = (p.x * b2.y - p.y * b2.x) / bdet;
        let v = (p.y * b1.x - p.x * b1.y) / bdet;
        let du = u - u.round();
        let dv = v - v.round();
        b1 * du + b2 * dv
    };

    let mut axes: Vec<Vec2> = Vec::new();
    for i in -4i64..=4 {
        for j in -4i64..=4 {
            let rhs = txy + b1 * i as f64 + b2 * j as f64;
            let p = fold(solve(rhs));
            // Invariance check, and duplicate rejection modulo the lattice.
            let moved = gk.linear.apply_xy(p) + txy - p;
            if fold(moved).norm() > 1e-9 {
                continue;
            }
            if axes.iter().all(|q| fold(p - *q).norm() > 1e-9) {
                axes.push(p);
            }
        }
    }
    axes.sort_by(|p, q| {
        let kp = ((p.x * 1e9).round() as i64, (p.y * 1e9).round() as i64);
        let kq = ((q.x * 1e9).round() as i64, (q.y * 1e9).round() as i64);
        kp.cmp(&kq)
    });
    Ok(axes)
}

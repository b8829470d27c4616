//! Square and hexagonal planar lattices and their Dirichlet-Voronoi cells.
//!
//! Both lattices are normalised so that every basis vector has norm `2a`;
//! the Voronoi cell around each lattice point then has apothem `a` (the
//! distance from the centre to the nearest cell wall).  The circumradius
//! (centre to cell vertex) is `a*sqrt(2)` for the square cell and
//! `2a/sqrt(3)` for the regular hexagon.

use crate::error::{Error, Result};
use crate::geom::Vec2;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Which planar lattice backs the metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Square,
    Hexagonal,
}

impl std::fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LatticeKind::Square => write!(f, "square"),
            LatticeKind::Hexagonal => write!(f, "hexagonal"),
        }
    }
}

/// A planar lattice with basis vectors of norm `2a`.
///
/// Square basis: `(2a, 0), (0, 2a)`.  Hexagonal basis: `(2a, 0),
/// (a, a*sqrt(3))` (angle pi/3), so nearest neighbours sit at distance
/// `2a` in both cases.
#[derive(Clone, Debug)]
pub struct Lattice2D {
    kind: LatticeKind,
    a: f64,
    basis: [Vec2; 2],
    // Rows of the inverse basis matrix: lattice coordinates of p are
    // (inv[0].dot(p), inv[1].dot(p)).
    inv: [Vec2; 2],
}

/// Closed convex Voronoi cell, vertices in counter-clockwise order.
#[derive(Clone, Debug)]
pub struct CellPolygon {
    pub vertices: Vec<Vec2>,
}

impl Lattice2D {
    /// Build a lattice with cell apothem `a > 0`.
    pub fn new(kind: LatticeKind, a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lattice parameter a must be positive and finite, got {a}"
            )));
        }
        let basis = match kind {
            LatticeKind::Square => [Vec2::new(2.0 * a, 0.0), Vec2::new(0.0, 2.0 * a)],
            LatticeKind::Hexagonal => [Vec2::new(2.0 * a, 0.0), Vec2::new(a, a * SQRT3)],
        };
        let det = basis[0].x * basis[1].y - basis[0].y * basis[1].x;
        let inv = [
            Vec2::new(basis[1].y / det, -basis[1].x / det),
            Vec2::new(-basis[0].y / det, basis[0].x / det),
        ];
        Ok(Lattice2D { kind, a, basis, inv })
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    /// Cell apothem: half the nearest-neighbour distance.
    pub fn apothem(&self) -> f64 {
        self.a
    }

    pub fn basis(&self) -> [Vec2; 2] {
        self.basis
    }

    /// Area of one Voronoi cell.
    pub fn cell_area(&self) -> f64 {
        match self.kind {
            LatticeKind::Square => 4.0 * self.a * self.a,
            LatticeKind::Hexagonal => 2.0 * SQRT3 * self.a * self.a,
        }
    }

    /// Distance from a cell centre to its vertices.
    pub fn circumradius(&self) -> f64 {
        match self.kind {
            LatticeKind::Square => self.a * std::f64::consts::SQRT_2,
            LatticeKind::Hexagonal => 2.0 * self.a / SQRT3,
        }
    }

    /// Lattice point with integer coordinates `(i, j)`.
    pub fn center(&self, i: i64, j: i64) -> Vec2 {
        self.basis[0] * i as f64 + self.basis[1] * j as f64
    }

    /// Real lattice coordinates of `p` (inverse basis applied).
    pub fn lattice_coords(&self, p: Vec2) -> (f64, f64) {
        (self.inv[0].dot(p), self.inv[1].dot(p))
    }

    /// Nearest lattice point to `p` and its integer coordinates.
    ///
    /// Folds `p` by rounding its lattice coordinates, then scans the 3x3
    /// neighbourhood (for the hexagonal basis rounding alone can be off
    /// by one).  Exact ties go to the lexicographically smaller `(i, j)`.
    pub fn nearest_center(&self, p: Vec2) -> (Vec2, (i64, i64)) {
        let (u, v) = self.lattice_coords(p);
        let i0 = u.round() as i64;
        let j0 = v.round() as i64;
        let mut best = (f64::INFINITY, (i64::MAX, i64::MAX), Vec2::default());
        for di in -1..=1 {
            for dj in -1..=1 {
                let ij = (i0 + di, j0 + dj);
                let c = self.center(ij.0, ij.1);
                let d2 = (p - c).norm2();
                if d2 < best.0 || (d2 == best.0 && ij < best.1) {
                    best = (d2, ij, c);
                }
            }
        }
        (best.2, best.1)
    }

    /// Distance from `p` to the lattice; bounded by the circumradius.
    pub fn dist_to_lattice(&self, p: Vec2) -> f64 {
        let (c, _) = self.nearest_center(p);
        (p - c).norm()
    }

    /// The Voronoi cell around the origin.
    pub fn cell_polygon(&self) -> CellPolygon {
        let a = self.a;
        let vertices = match self.kind {
            LatticeKind::Square => vec![
                Vec2::new(a, -a),
                Vec2::new(a, a),
                Vec2::new(-a, a),
                Vec2::new(-a, -a),
            ],
            LatticeKind::Hexagonal => {
                let r = a / SQRT3;
                vec![
                    Vec2::new(a, -r),
                    Vec2::new(a, r),
                    Vec2::new(0.0, 2.0 * r),
                    Vec2::new(-a, r),
                    Vec2::new(-a, -r),
                    Vec2::new(0.0, -2.0 * r),
                ]
            }
        };
        CellPolygon { vertices }
    }
}

impl CellPolygon {
    /// True if `p` lies in the closed cell, with `tol` slack on each wall.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            // CCW orientation: interior is on the left of each edge.
            let cross = e.x * (p.y - a.y) - e.y * (p.x - a.x);
            if cross < -tol * e.norm() {
                return false;
            }
        }
        true
    }

    /// Closest point of the closed cell: the identity inside, the
    /// nearest boundary point outside.
    pub fn project(&self, p: Vec2) -> Vec2 {
        if self.contains(p, 0.0) {
            return p;
        }
        let n = self.vertices.len();
        let mut best = (f64::INFINITY, p);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            let t = ((p - a).dot(e) / e.norm2()).clamp(0.0, 1.0);
            let q = a + e * t;
            let d2 = (p - q).norm2();
            if d2 < best.0 {
                best = (d2, q);
            }
        }
        best.1
    }
}

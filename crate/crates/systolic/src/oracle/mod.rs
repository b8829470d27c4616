//! Shortest-path estimates on a grid discretisation of the covering
//! torus.
//!
//! The graph covers one fundamental block of the covering torus:
//! periodic in the two horizontal directions (the hexagonal wrap shears
//! rows by half a box width, matching the doubled-lattice
//! identifications) and an open vertical strip of one vertical period
//! plus margins.  Horizontal translates of a deck motion are therefore
//! folded away automatically, while vertical displacements stay
//! literal, so shortest paths to the image of a base point measure the
//! motion's displacement honestly.
//!
//! Because the warp factor does not depend on the height, every edge
//! weight depends only on the horizontal column of its endpoints.  The
//! graph is kept implicit: per-column weight tables replace an explicit
//! edge list, and searches enumerate the stencil on the fly.  All
//! queries are deterministic; heap ties break by node index.

pub mod bavard;
pub mod jacobi;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geom::{Vec2, Vec3};
use crate::groups::{Isometry3, QuotientSpec};
use crate::lattice::{LatticeKind, SQRT3};
use crate::metric::{segment_length, MetricSpec};

/// Default cap on the number of grid nodes.
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

/// Environment variable that overrides the default node cap.
pub const NODE_CAP_ENV: &str = "SYSTOLIC_NODE_CAP";

/// Node budget resolution order: explicit request, then the
/// environment, then the default.
pub fn resolve_node_cap(requested: Option<usize>) -> usize {
    if let Some(cap) = requested {
        return cap;
    }
    std::env::var(NODE_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_CAP)
}

/// Worst-direction overhead of the `k`-neighbourhood stencil: the
/// asymptotic factor by which grid paths can exceed straight lines
/// (axis stencil: corner direction costs sqrt(3); with face diagonals:
/// sqrt(3/2); with cell diagonals: (2 + 2 cos(pi/4... )) evaluated on
/// the worst ray (2,1,1)).
fn stencil_overhead(k: u32) -> f64 {
    match k {
        1 => 0.7321,
        2 => 0.2248,
        _ => 0.1155,
    }
}

/// Stencil offsets for the `k`-neighbourhood: axis moves, then face
/// diagonals, then cell diagonals.
fn stencil(k: u32) -> Vec<(i64, i64, i64)> {
    let mut out = vec![
        (1, 0, 0),
        (-1, 0, 0),
        (0, 1, 0),
        (0, -1, 0),
        (0, 0, 1),
        (0, 0, -1),
    ];
    if k >= 2 {
        for &(dx, dy) in &[(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            out.push((dx, dy, 0));
        }
        for &s in &[1, -1] {
            for &t in &[1, -1] {
                out.push((s, 0, t));
                out.push((0, s, t));
            }
        }
    }
    if k >= 3 {
        for &dx in &[1, -1] {
            for &dy in &[1, -1] {
                for &dz in &[1, -1] {
                    out.push((dx, dy, dz));
                }
            }
        }
    }
    out
}

/// Grid discretisation of one covering-torus block.
///
/// Horizontal steps divide the apothem (and, on the hexagonal lattice,
/// a third of the long cell diagonal), so lattice points, cell corners
/// of the square cell, and the deep holes of the hexagonal cell all
/// land on grid columns.  Vertical steps divide one twelfth of the
/// period, so every screw rise in the catalogue lands on a grid level.
#[derive(Clone, Debug)]
pub struct GeodesicGraph {
    spec: MetricSpec,
    h: f64,
    k: u32,
    offsets: Vec<(i64, i64, i64)>,
    nx: usize,
    ny: usize,
    nz: usize,
    hx: f64,
    hy: f64,
    hz: f64,
    /// Index of the z = 0 level.
    iz0: usize,
    box_w: f64,
    box_h: f64,
    /// Horizontal shift, in cells, applied when wrapping one box height
    /// (hexagonal shear; zero on rectangular boxes).
    skew_cells: i64,
    skew_len: f64,
    /// Square root of the warp factor per column; all ones when flat.
    sqrt_psi: Vec<f64>,
    /// Global lower bound of `sqrt_psi`, used by the search heuristic.
    cos_floor: f64,
    diag_xy: f64,
    /// Lengths of the rising edges with one grid step in x (resp. y),
    /// indexed by the column of the lower-coordinate endpoint.
    mixed_x: Vec<f64>,
    mixed_y: Vec<f64>,
    /// Cell-diagonal rising edges, split by the sign pattern of
    /// (dx, dy): (+, +) and (+, -), indexed like `mixed_x`.
    mixed_pp: Vec<f64>,
    mixed_pm: Vec<f64>,
}

/// Result of an equivariant distance query.
#[derive(Clone, Debug)]
pub struct EquivariantDistance {
    /// Minimum over base points of the graph distance to the image.
    pub value: f64,
    /// Base point realising the minimum (on the z = 0 level).
    pub base_point: Vec3,
    /// Reported tolerance: stencil overhead plus snapping slack.
    pub epsilon: f64,
    /// Number of shortest-path runs that were not pruned away.
    pub searched_sources: usize,
}

/// How a homotopy class was measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassMethod {
    /// Closed form; horizontal translations have Euclidean length.
    Exact,
    /// Graph shortest path.
    Graph,
    /// Excluded by a proved lower bound; `value` holds that bound.
    Pruned,
}

impl std::fmt::Display for ClassMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassMethod::Exact => "exact",
            ClassMethod::Graph => "graph",
            ClassMethod::Pruned => "pruned",
        };
        f.write_str(s)
    }
}

/// Length estimate for one free-homotopy class of deck motions.
#[derive(Clone, Debug)]
pub struct ClassEstimate {
    pub label: String,
    pub value: f64,
    pub method: ClassMethod,
    pub base_point: Option<Vec3>,
}

/// Systole estimate over the deck classes of a quotient.
#[derive(Clone, Debug)]
pub struct SystoleEstimate {
    /// Minimum over the measured (non-pruned) classes.
    pub value: f64,
    /// Tolerance of the winning class.
    pub epsilon: f64,
    pub resolution: f64,
    pub node_count: usize,
    pub classes: Vec<ClassEstimate>,
}

/// Builds the grid graph for a metric at nominal resolution `h` with
/// the `k`-neighbourhood stencil (1 = axis, 2 = face diagonals,
/// 3 = cell diagonals).
pub fn build_graph(
    spec: &MetricSpec,
    h: f64,
    k: u32,
    node_cap: Option<usize>,
) -> Result<GeodesicGraph> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "resolution must be positive and finite, got {h}"
        )));
    }
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "neighbourhood index must be 1, 2, or 3, got {k}"
        )));
    }
    let (nx, ny, hx, hy, skew_cells, vp) = match spec {
        MetricSpec::Singular {
            lattice,
            vertical_period,
        } => {
            let a = lattice.apothem();
            if h >= a {
                return Err(Error::InvalidParameter(format!(
                    "resolution {h} does not resolve the cell (apothem {a})"
                )));
            }
            let q = (a / h).ceil() as usize;
            let hx = a / q as f64;
            match lattice.kind() {
                LatticeKind::Square => (4 * q, 4 * q, hx, hx, 0i64, *vertical_period),
                LatticeKind::Hexagonal => {
                    // Rows step by a third of the long diagonal so the
                    // deep holes sit on columns; one box height is six
                    // row blocks and wraps with a two-apothem shear.
                    let m = (a / (SQRT3 * h)).ceil() as usize;
                    let hy = a / (SQRT3 * m as f64);
                    (4 * q, 6 * m, hx, hy, 2 * q as i64, *vertical_period)
                }
            }
        }
        MetricSpec::Flat { basis } => {
            let scale = basis.iter().map(|b| b.norm()).fold(0.0, f64::max);
            let off = basis[0].y.abs().max(basis[0].z.abs())
                + basis[1].x.abs().max(basis[1].z.abs())
                + basis[2].x.abs().max(basis[2].y.abs());
            if off > 1e-9 * scale {
                return Err(Error::Unsupported(
                    "the graph oracle covers axis-aligned orthogonal flat bases only".into(),
                ));
            }
            let px = basis[0].x.abs();
            let py = basis[1].y.abs();
            let pz = basis[2].z.abs();
            if h >= px.min(py).min(pz) {
                return Err(Error::InvalidParameter(format!(
                    "resolution {h} does not resolve the fundamental block"
                )));
            }
            let nx = (px / h).ceil().max(2.0) as usize;
            let ny = (py / h).ceil().max(2.0) as usize;
            (nx, ny, px / nx as f64, py / ny as f64, 0i64, pz)
        }
    };
    // Twelve vertical sublevels per rise unit cover every screw order
    // in the catalogue, so rises land exactly on grid levels.
    let s = (vp / (12.0 * h)).ceil().max(1.0) as usize;
    let hz = vp / (12.0 * s as f64);
    let span = 12 * s;
    let margin = ((vp / 4.0) / hz).ceil() as usize;
    let nz = span + 2 * margin + 1;
    let nodes = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(nz))
        .ok_or_else(|| Error::InvalidParameter("grid size overflows".into()))?;
    let cap = resolve_node_cap(node_cap);
    if nodes > cap {
        return Err(Error::NodeCapExceeded { nodes, cap });
    }

    if nodes > u32::MAX as usize {
        return Err(Error::InvalidParameter(
            "grid exceeds the addressable node range".into(),
        ));
    }

    let nxy = nx * ny;
    let col_pos = |c: usize| Vec2::new((c % nx) as f64 * hx, (c / nx) as f64 * hy);
    let mut sqrt_psi = vec![1.0; nxy];
    if let MetricSpec::Singular { lattice, .. } = spec {
        for (c, w) in sqrt_psi.iter_mut().enumerate() {
            *w = lattice.dist_to_lattice(col_pos(c)).cos();
        }
    }
    let cos_floor = sqrt_psi.iter().cloned().fold(f64::INFINITY, f64::min);

    let rising = |dx: f64, dy: f64| -> Vec<f64> {
        (0..nxy)
            .map(|c| {
                let p = col_pos(c);
                let q = Vec3::new(p.x + dx, p.y + dy, hz);
                segment_length(Vec3::new(p.x, p.y, 0.0), q, spec)
            })
            .collect()
    };
    let (mixed_x, mixed_y) = if k >= 2 {
        (rising(hx, 0.0), rising(0.0, hy))
    } else {
        (Vec::new(), Vec::new())
    };
    let (mixed_pp, mixed_pm) = if k >= 3 {
        (rising(hx, hy), rising(hx, -hy))
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(GeodesicGraph {
        spec: spec.clone(),
        h,
        k,
        offsets: stencil(k),
        nx,
        ny,
        nz,
        hx,
        hy,
        hz,
        iz0: margin,
        box_w: nx as f64 * hx,
        box_h: ny as f64 * hy,
        skew_cells,
        skew_len: skew_cells as f64 * hx,
        sqrt_psi,
        cos_floor,
        diag_xy: hx.hypot(hy),
        mixed_x,
        mixed_y,
        mixed_pp,
        mixed_pm,
    })
}

/// Search state reused across the sources of one query.
struct Scratch {
    dist: Vec<f64>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![f64::INFINITY; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &t in &self.touched {
            self.dist[t as usize] = f64::INFINITY;
        }
        self.touched.clear();
        self.heap.clear();
    }
}

impl GeodesicGraph {
    pub fn node_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn resolution(&self) -> f64 {
        self.h
    }

    pub fn neighborhood(&self) -> u32 {
        self.k
    }

    pub fn spec(&self) -> &MetricSpec {
        &self.spec
    }

    /// Largest actual grid step (all steps are at most the nominal
    /// resolution).
    pub fn max_step(&self) -> f64 {
        self.hx.max(self.hy).max(self.hz)
    }

    fn column_pos(&self, col: usize) -> Vec2 {
        let ix = col % self.nx;
        let iy = col / self.nx;
        Vec2::new(ix as f64 * self.hx, iy as f64 * self.hy)
    }

    /// Position of a node in the covered block (z relative to the base
    /// level).
    pub fn node_position(&self, node: u32) -> Vec3 {
        let nxy = self.nx * self.ny;
        let col = node as usize % nxy;
        let iz = node as usize / nxy;
        let p = self.column_pos(col);
        Vec3::new(p.x, p.y, (iz as f64 - self.iz0 as f64) * self.hz)
    }

    /// Folds a point into the horizontal box, applying the shear that
    /// accompanies row wraps.
    fn fold_xy(&self, p: Vec2) -> Vec2 {
        let wy = (p.y / self.box_h).floor();
        let y = p.y - wy * self.box_h;
        let mut x = p.x + wy * self.skew_len;
        x -= (x / self.box_w).floor() * self.box_w;
        Vec2::new(x, y)
    }

    /// Distance between two folded points, minimised over the wrap
    /// images.
    fn folded_xy_dist(&self, p: Vec2, q: Vec2) -> f64 {
        let mut best = f64::INFINITY;
        for wy in -1i64..=1 {
            let img_y = q.y - wy as f64 * self.box_h;
            let img_x = q.x + wy as f64 * self.skew_len;
            let mut dx = p.x - img_x;
            dx -= (dx / self.box_w).round() * self.box_w;
            let d2 = dx * dx + (p.y - img_y) * (p.y - img_y);
            if d2 < best {
                best = d2;
            }
        }
        best.sqrt()
    }

    /// Nearest column to an arbitrary planar point, with the snapping
    /// distance.
    fn snap_column(&self, p: Vec2) -> (usize, f64) {
        let f = self.fold_xy(p);
        let mut iy = (f.y / self.hy).round() as i64;
        let mut x = f.x;
        if iy >= self.ny as i64 {
            // The rounded row sits on the top identification; shear
            // back onto row zero.
            iy -= self.ny as i64;
            x += self.skew_len;
        }
        let ix = (x / self.hx).round() as i64;
        let col = iy.rem_euclid(self.ny as i64) as usize * self.nx
            + ix.rem_euclid(self.nx as i64) as usize;
        let err = self.folded_xy_dist(f, self.column_pos(col));
        (col, err)
    }

    /// Node nearest to a point of the cover; the height must fall in
    /// the covered strip.
    pub fn nearest_node(&self, p: Vec3) -> Result<u32> {
        let iz = self.iz0 as i64 + (p.z / self.hz).round() as i64;
        if iz < 0 || iz >= self.nz as i64 {
            return Err(Error::RegionTooSmall(format!(
                "height {} is outside the covered strip",
                p.z
            )));
        }
        let (col, _) = self.snap_column(p.xy());
        Ok((iz as usize * self.nx * self.ny + col) as u32)
    }

    /// Neighbour of `(ix, iy, iz)` along a stencil offset, or None when
    /// the move leaves the vertical strip.
    fn neighbor(&self, ix: usize, iy: usize, iz: usize, off: (i64, i64, i64)) -> Option<u32> {
        let iz2 = iz as i64 + off.2;
        if iz2 < 0 || iz2 >= self.nz as i64 {
            return None;
        }
        let raw_y = iy as i64 + off.1;
        let wy = raw_y.div_euclid(self.ny as i64);
        let iy2 = raw_y.rem_euclid(self.ny as i64) as usize;
        let ix2 = (ix as i64 + off.0 + wy * self.skew_cells).rem_euclid(self.nx as i64) as usize;
        Some(((iz2 as usize * self.ny + iy2) * self.nx + ix2) as u32)
    }

    /// Weight of the edge from the column `col` (indices `ix`, `iy`)
    /// along `off`, given the neighbour's column `ncol`.
    fn edge_weight(&self, col: usize, ncol: usize, off: (i64, i64, i64)) -> f64 {
        let (dx, dy, dz) = off;
        if dz == 0 {
            if dx != 0 && dy != 0 {
                self.diag_xy
            } else if dx != 0 {
                self.hx
            } else {
                self.hy
            }
        } else if dx == 0 && dy == 0 {
            self.sqrt_psi[col] * self.hz
        } else if dy == 0 {
            self.mixed_x[if dx > 0 { col } else { ncol }]
        } else if dx == 0 {
            self.mixed_y[if dy > 0 { col } else { ncol }]
        } else if dx == dy {
            self.mixed_pp[if dx > 0 { col } else { ncol }]
        } else {
            self.mixed_pm[if dx > 0 { col } else { ncol }]
        }
    }

    /// Edges incident to a node, for inspection and tests.
    pub fn edges_of(&self, node: u32) -> Vec<(u32, f64)> {
        let nxy = self.nx * self.ny;
        let col = node as usize % nxy;
        let iz = node as usize / nxy;
        let ix = col % self.nx;
        let iy = col / self.nx;
        let mut out = Vec::with_capacity(self.offsets.len());
        for &off in &self.offsets {
            if let Some(nb) = self.neighbor(ix, iy, iz, off) {
                let ncol = nb as usize % nxy;
                out.push((nb, self.edge_weight(col, ncol, off)));
            }
        }
        out
    }

    /// Admissible heuristic: the straight-line lower bound with the
    /// warp replaced by its floor, minimised over wrap images.
    fn heuristic(&self, p: Vec3, target: Vec3) -> f64 {
        let dxy = self.folded_xy_dist(p.xy(), target.xy());
        let dz = (p.z - target.z) * self.cos_floor;
        dxy.hypot(dz)
    }

    /// Bounded A* from `source` to `target`; `None` means every path
    /// is longer than `bound`.
    fn search(&self, scratch: &mut Scratch, source: u32, target: u32, bound: f64) -> Option<f64> {
        if source == target {
            return Some(0.0);
        }
        let nxy = self.nx * self.ny;
        let target_pos = self.node_position(target);
        scratch.reset();
        scratch.dist[source as usize] = 0.0;
        scratch.touched.push(source);
        let f0 = self.heuristic(self.node_position(source), target_pos);
        scratch.heap.push(Reverse((f0.to_bits(), source)));
        while let Some(Reverse((fbits, u))) = scratch.heap.pop() {
            let f = f64::from_bits(fbits);
            if f > bound {
                return None;
            }
            if u == target {
                return Some(scratch.dist[u as usize]);
            }
            let du = scratch.dist[u as usize];
            // Lazy deletion: skip entries superseded by a shorter path.
            if f > du + self.heuristic(self.node_position(u), target_pos) + 1e-12 {
                continue;
            }
            let col = u as usize % nxy;
            let iz = u as usize / nxy;
            let ix = col % self.nx;
            let iy = col / self.nx;
            for &off in &self.offsets {
                let Some(v) = self.neighbor(ix, iy, iz, off) else {
                    continue;
                };
                let ncol = v as usize % nxy;
                let nd = du + self.edge_weight(col, ncol, off);
                if nd < scratch.dist[v as usize] {
                    if scratch.dist[v as usize].is_infinite() {
                        scratch.touched.push(v);
                    }
                    scratch.dist[v as usize] = nd;
                    let fv = nd + self.heuristic(self.node_position(v), target_pos);
                    scratch.heap.push(Reverse((fv.to_bits(), v)));
                }
            }
        }
        None
    }

    /// Graph distance between two points of the cover (each snapped to
    /// its nearest node).  Horizontal wrap images are identified, so
    /// this is a covering-torus distance in the plane directions.
    pub fn distance(&self, p: Vec3, q: Vec3) -> Result<f64> {
        let source = self.nearest_node(p)?;
        let target = self.nearest_node(q)?;
        let mut scratch = Scratch::new(self.node_count());
        self.search(&mut scratch, source, target, f64::INFINITY)
            .ok_or_else(|| Error::NoPath("grid components are disconnected".into()))
    }

    /// Column permutations induced by symmetries that fix the metric,
    /// act exactly on the grid, and conjugate `g` into itself modulo
    /// the folded horizontal lattice.  Used to shrink the source set.
    fn source_symmetries(&self, g: &Isometry3) -> Vec<Vec<u32>> {
        let lat = match &self.spec {
            MetricSpec::Singular { lattice, .. } => lattice,
            MetricSpec::Flat { .. } => return Vec::new(),
        };
        let [b1, b2] = lat.basis();
        let h1 = Vec2::new(2.0 * b1.x, 2.0 * b1.y);
        let h2 = Vec2::new(2.0 * b2.x, 2.0 * b2.y);
        // A translation lies in the doubled lattice iff its
        // coordinates there are (nearly) integers.
        let in_doubled = |v: Vec2| -> bool {
            let det = h1.x * h2.y - h1.y * h2.x;
            let s = (v.x * h2.y - v.y * h2.x) / det;
            let t = (h1.x * v.y - h1.y * v.x) / det;
            (s - s.round()).abs() < 1e-9 && (t - t.round()).abs() < 1e-9
        };
        let rot = |p: Vec2, c: f64, s: f64| Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y);
        // Candidate maps: point reflection, the two axis mirrors, and
        // the two single-lattice translations.
        let candidates: Vec<Box<dyn Fn(Vec2) -> Vec2>> = vec![
            Box::new(move |p| rot(p, -1.0, 0.0)),
            Box::new(move |p| Vec2::new(-p.x, p.y)),
            Box::new(move |p| Vec2::new(p.x, -p.y)),
            Box::new(move |p| p + b1),
            Box::new(move |p| p + b2),
        ];
        let g_lin = g.linear;
        let conj_ok = |map_lin: Option<[f64; 4]>, map_tr: Vec2| -> bool {
            match map_lin {
                None => {
                    // Translation conjugation shifts the class by
                    // (R - I) b; valid when that lands in the folded
                    // lattice.
                    let rb = g_lin.apply(Vec3::new(map_tr.x, map_tr.y, 0.0));
                    in_doubled(Vec2::new(rb.x - map_tr.x, rb.y - map_tr.y))
                }
                Some(m) => {
                    // Linear conjugation must fix the rotation part and
                    // move the translation within the folded lattice.
                    let gm = g_lin.matrix();
                    let a = [
                        m[0] * gm[0][0] + m[1] * gm[1][0],
                        m[0] * gm[0][1] + m[1] * gm[1][1],
                        m[2] * gm[0][0] + m[3] * gm[1][0],
                        m[2] * gm[0][1] + m[3] * gm[1][1],
                    ];
                    let b = [
                        gm[0][0] * m[0] + gm[0][1] * m[2],
                        gm[0][0] * m[1] + gm[0][1] * m[3],
                        gm[1][0] * m[0] + gm[1][1] * m[2],
                        gm[1][0] * m[1] + gm[1][1] * m[3],
                    ];
                    let commutes = a
                        .iter()
                        .zip(b.iter())
                        .all(|(x, y)| (x - y).abs() < 1e-9);
                    let t = g.translation;
                    let lt = Vec2::new(m[0] * t.x + m[1] * t.y, m[2] * t.x + m[3] * t.y);
                    commutes && in_doubled(lt - t.xy())
                }
            }
        };
        let lin_mats = [
            Some([-1.0, 0.0, 0.0, -1.0]),
            Some([-1.0, 0.0, 0.0, 1.0]),
            Some([1.0, 0.0, 0.0, -1.0]),
            None,
            None,
        ];
        let trs = [Vec2::default(), Vec2::default(), Vec2::default(), b1, b2];
        let nxy = self.nx * self.ny;
        let mut perms = Vec::new();
        'cand: for (i, map) in candidates.iter().enumerate() {
            if !conj_ok(lin_mats[i], trs[i]) {
                continue;
            }
            let mut perm = vec![0u32; nxy];
            for c in 0..nxy {
                let (img, err) = self.snap_column(map(self.column_pos(c)));
                if err > 1e-9 {
                    // The map does not act exactly on the grid.
                    continue 'cand;
                }
                perm[c] = img as u32;
            }
            perms.push(perm);
        }
        perms
    }

    /// Minimum over base points of the distance to their image under
    /// `g`: the length of the shortest closed curve in the folded class
    /// of `g`.  Pure horizontal translations are Euclidean and returned
    /// in closed form; vertical displacements must fit in the strip.
    pub fn equivariant_distance(&self, g: &Isometry3) -> Result<EquivariantDistance> {
        let txy = g.translation.xy();
        let tz = g.translation.z;
        if g.linear.is_identity() && txy.norm() < 1e-12 && tz.abs() < 1e-12 {
            return Err(Error::InvalidParameter(
                "the identity has no displacement".into(),
            ));
        }
        if g.linear.matrix()[2][2] < 0.0 {
            return Err(Error::Unsupported(
                "motions that flip the height are outside the graph model".into(),
            ));
        }
        if g.is_pure_translation() && tz.abs() < 1e-12 {
            // Horizontal planes are Euclidean, so the straight segment
            // is minimal at every base point.
            return Ok(EquivariantDistance {
                value: txy.norm(),
                base_point: Vec3::default(),
                epsilon: 0.0,
                searched_sources: 0,
            });
        }
        let level = (tz / self.hz).round() as i64;
        let z_snap = (tz - level as f64 * self.hz).abs();
        let target_iz = self.iz0 as i64 + level;
        if target_iz < 0 || target_iz >= self.nz as i64 {
            return Err(Error::RegionTooSmall(format!(
                "vertical displacement {tz} exceeds the covered strip"
            )));
        }
        let nxy = self.nx * self.ny;
        let base = self.iz0 * nxy;
        let tbase = target_iz as usize * nxy;

        // Per-column targets, lower bounds, and exact vertical seeds
        // (columns fixed by the horizontal part carry a closed vertical
        // curve whose graph cost is exact).
        let mut target_col = vec![0u32; nxy];
        let mut snaps = vec![0.0f64; nxy];
        let mut lb = vec![0.0f64; nxy];
        let mut best = f64::INFINITY;
        let mut best_col = None;
        let mut best_seed = false;
        for c in 0..nxy {
            let p = self.column_pos(c);
            let img = g.apply(Vec3::new(p.x, p.y, 0.0));
            let (tc, err) = self.snap_column(img.xy());
            target_col[c] = tc as u32;
            snaps[c] = err;
            let src = (base + c) as u32;
            let tgt = (tbase + tc) as u32;
            lb[c] = self.heuristic(self.node_position(src), self.node_position(tgt));
            if tc == c && err <= 1e-9 && z_snap <= 1e-9 {
                let seed = self.sqrt_psi[c] * tz.abs();
                if seed < best {
                    best = seed;
                    best_col = Some(c);
                    best_seed = true;
                }
            }
        }
        if let (Some(c), true) = (best_col, tz.abs() < 1e-12) {
            // A fixed column with no rise: the class is not free and
            // its displacement is zero.
            let p = self.column_pos(c);
            return Ok(EquivariantDistance {
                value: 0.0,
                base_point: Vec3::new(p.x, p.y, 0.0),
                epsilon: 0.0,
                searched_sources: 0,
            });
        }

        // Source reduction by exact grid symmetries of the class.
        let perms = self.source_symmetries(g);
        let mut canonical = vec![true; nxy];
        if !perms.is_empty() {
            for c in 0..nxy {
                let mut orbit = vec![c as u32];
                let mut seen = 0;
                while seen < orbit.len() && orbit.len() <= 64 {
                    let cur = orbit[seen] as usize;
                    seen += 1;
                    for perm in &perms {
                        let img = perm[cur];
                        if !orbit.contains(&img) {
                            orbit.push(img);
                        }
                    }
                }
                if orbit.iter().any(|&o| (o as usize) < c) {
                    canonical[c] = false;
                }
            }
        }

        let mut order: Vec<usize> = (0..nxy).filter(|&c| canonical[c]).collect();
        order.sort_by(|&a, &b| lb[a].partial_cmp(&lb[b]).unwrap().then(a.cmp(&b)));

        let mut scratch = Scratch::new(self.node_count());
        let mut searched = 0usize;
        let mut limit = best;
        if limit.is_infinite() {
            // No vertical seed: bootstrap from straight-segment upper
            // bounds, inflated past the stencil overhead.
            let mut straight = f64::INFINITY;
            for &c in order.iter().step_by(1 + order.len() / 256) {
                let p = self.column_pos(c);
                let q = self.node_position((tbase + target_col[c] as usize) as u32);
                // Use the wrap image of the target closest to the
                // source; the metric is periodic under the wraps.
                let mut img = q;
                let mut bd = f64::INFINITY;
                for wy in -1i64..=1 {
                    for wx in -1i64..=1 {
                        let cand = Vec3::new(
                            q.x + wy as f64 * self.skew_len + wx as f64 * self.box_w,
                            q.y - wy as f64 * self.box_h,
                            q.z,
                        );
                        let d = (cand.xy() - p).norm();
                        if d < bd {
                            bd = d;
                            img = cand;
                        }
                    }
                }
                let len = segment_length(Vec3::new(p.x, p.y, 0.0), img, &self.spec);
                straight = straight.min(len);
            }
            limit = straight * (1.0 + stencil_overhead(self.k)) + 6.0 * self.max_step();
        }
        let mut tries = 0;
        loop {
            for &c in &order {
                if lb[c] >= best.min(limit) {
                    break;
                }
                let src = (base + c) as u32;
                let tgt = (tbase + target_col[c] as usize) as u32;
                searched += 1;
                if let Some(d) = self.search(&mut scratch, src, tgt, best.min(limit)) {
                    if d < best {
                        best = d;
                        best_col = Some(c);
                        best_seed = false;
                    }
                }
            }
            if best.is_finite() || tries >= 3 {
                break;
            }
            limit *= 2.0;
            tries += 1;
        }
        let arg = best_col
            .ok_or_else(|| Error::NoPath("no equivariant path found within bounds".into()))?;
        if !best.is_finite() {
            return Err(Error::NoPath(
                "no equivariant path found within bounds".into(),
            ));
        }
        let snap = if best_seed { 0.0 } else { snaps[arg] };
        let p = self.column_pos(arg);
        Ok(EquivariantDistance {
            value: best,
            base_point: Vec3::new(p.x, p.y, 0.0),
            epsilon: stencil_overhead(self.k) * best + 2.0 * (snap + z_snap) + 1e-12,
            searched_sources: searched,
        })
    }
}

/// Estimates the systole of a warped quotient: the minimum over
/// free-homotopy classes of deck motions of the equivariant distance.
/// Classes collapse modulo the folded horizontal lattice, leaving the
/// horizontal translations (Euclidean, exact), the vertical
/// translation, and one class per screw power; `max_word_length`
/// bounds the vertical winding added to each screw power.  Classes
/// whose projection lower bound cannot beat the running minimum are
/// pruned and reported with that bound.
pub fn systole_estimate(
    spec: &QuotientSpec,
    h: f64,
    k: u32,
    max_word_length: usize,
    node_cap: Option<usize>,
) -> Result<SystoleEstimate> {
    let MetricSpec::Singular { lattice, .. } = spec.metric() else {
        return Err(Error::Unsupported(
            "flat quotients reduce to lattice arithmetic; the graph estimate covers the warped metrics"
                .into(),
        ));
    };
    if max_word_length == 0 {
        return Err(Error::InvalidParameter(
            "word length bound must be at least 1".into(),
        ));
    }
    let a = lattice.apothem();
    let cos_r = lattice.circumradius().cos();
    let vp = spec
        .metric()
        .vertical_period()
        .expect("singular metrics carry a period");
    let graph = build_graph(spec.metric(), h, k, node_cap)?;

    let mut classes = Vec::new();
    let mut best = 4.0 * a;
    let mut best_eps = 0.0;
    classes.push(ClassEstimate {
        label: "horizontal translation".into(),
        value: 4.0 * a,
        method: ClassMethod::Exact,
        base_point: None,
    });

    // Candidate classes with projection lower bounds, cheapest first.
    let order = spec.order();
    let mut candidates: Vec<(String, Isometry3, f64)> = Vec::new();
    candidates.push((
        "vertical translation".into(),
        Isometry3::from_translation(Vec3::new(0.0, 0.0, vp)),
        cos_r * vp,
    ));
    if order >= 2 {
        for p in 1..=order / 2 {
            let mut g = spec.deck_power(p)?;
            let mut rise = g.translation.z;
            let l = max_word_length as i64;
            for j in -l..=l {
                let r = g.translation.z + j as f64 * vp;
                if r.abs() < rise.abs() - 1e-12
                    || (r.abs() < rise.abs() + 1e-12 && r > rise)
                {
                    rise = r;
                }
            }
            g.translation.z = rise;
            let label = if p * 2 == order {
                format!("screw power {p}")
            } else {
                format!("screw power {p} (same lengths as power {})", order - p)
            };
            candidates.push((label, g, cos_r * rise.abs()));
        }
    }
    candidates.sort_by(|x, y| x.2.partial_cmp(&y.2).unwrap());

    for (label, g, bound) in candidates {
        if bound >= best {
            classes.push(ClassEstimate {
                label,
                value: bound,
                method: ClassMethod::Pruned,
                base_point: None,
            });
            continue;
        }
        let ed = graph.equivariant_distance(&g)?;
        if ed.value < best {
            best = ed.value;
            best_eps = ed.epsilon;
        }
        classes.push(ClassEstimate {
            label,
            value: ed.value,
            method: ClassMethod::Graph,
            base_point: Some(ed.base_point),
        });
    }

    Ok(SystoleEstimate {
        value: best,
        epsilon: best_eps,
        resolution: h,
        node_count: graph.node_count(),
        classes,
    })
}

//! Finite metric measure spaces and their geodesic structure.
//!
//! A space is a finite point set with a metric, a nonnegative reference
//! weight per point, and a model tag. Model-backed spaces (Euclidean grids,
//! circles, weighted graphs) evaluate distances from closed form or from
//! shortest paths; explicit spaces carry a dense validated matrix. Geodesics
//! evaluate at arbitrary parameters and report how far an evaluated point
//! had to move to land on the discrete point set.

use crate::numeric::stable_sum;
use crate::scalar::Real;
use rand::Rng;
use thiserror::Error;

/// Validation and query failures for spaces.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpaceError {
    #[error("distance matrix is not square")]
    NotSquare,
    #[error("distance asymmetry at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("negative distance at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("nonzero diagonal at {i}")]
    NonzeroDiagonal { i: usize },
    #[error("triangle inequality fails on ({i}, {j}, {k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("negative reference weight at {i}")]
    NegativeWeight { i: usize },
    #[error("weight vector length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("point index {i} out of range (n = {n})")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("graph edge ({i}, {j}) has nonpositive length")]
    NonpositiveEdge { i: usize, j: usize },
    #[error("graph is disconnected: no path from {i} to {j}")]
    Disconnected { i: usize, j: usize },
    #[error("geodesics need a model-backed space")]
    NoModelGeodesic,
    #[error("empty slope neighborhood at {i} for radius {radius}")]
    EmptyNeighborhood { i: usize, radius: f64 },
    #[error("invalid model parameters: {0}")]
    BadModel(String),
}

/// Model tag describing where the metric comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<R: Real> {
    /// Dense user-supplied matrix.
    Explicit,
    /// Axis-aligned lattice in `shape.len()` dimensions with Euclidean metric.
    EuclideanGrid {
        shape: Vec<usize>,
        spacing: R,
        origin: Vec<R>,
    },
    /// `n` equispaced points on a circle with arc-length metric.
    Circle { radius: R, n: usize },
    /// Undirected graph with positive edge lengths, shortest-path metric.
    WeightedGraph { edges: Vec<(usize, usize, R)> },
}

enum DistStore<R: Real> {
    Dense(Vec<R>),
    Grid,
    Circle,
}

/// A point of a geodesic evaluation: either a point of the space or an
/// off-lattice location in the model's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Position<R: Real> {
    Index(usize),
    Coord(Vec<R>),
}

/// Finite metric measure space.
pub struct MetricMeasureSpace<R: Real> {
    n: usize,
    model: Model<R>,
    store: DistStore<R>,
    weights: Vec<R>,
    /// Adjacency for graph models, kept for geodesic reconstruction.
    adjacency: Option<Vec<Vec<(usize, R)>>>,
    diam: R,
}

/// Comparison slack absorbing float rounding in closed-form distances.
fn eps_slack<R: Real>(scale: R) -> R {
    R::of(32.0) * R::epsilon() * (R::one() + scale)
}

impl<R: Real> MetricMeasureSpace<R> {
    /// Builds a space from an explicit distance matrix.
    ///
    /// Symmetry, nonnegativity, zero diagonal and the triangle inequality are
    /// validated; the triangle check is exhaustive for n <= 300 and sampled
    /// (10^6 seeded triples) beyond that.
    pub fn from_matrix(dist: Vec<Vec<R>>, weights: Vec<R>) -> Result<Self, SpaceError> {
        let n = dist.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &dist {
            if row.len() != n {
                return Err(SpaceError::NotSquare);
            }
            flat.extend_from_slice(row);
        }
        check_weights(&weights, n)?;
        let mut diam = R::zero();
        for i in 0..n {
            if flat[i * n + i] != R::zero() {
                return Err(SpaceError::NonzeroDiagonal { i });
            }
            for j in 0..n {
                let d = flat[i * n + j];
                if d < R::zero() {
                    return Err(SpaceError::NegativeDistance { i, j });
                }
                if d != flat[j * n + i] {
                    return Err(SpaceError::Asymmetric { i, j });
                }
                if d > diam {
                    diam = d;
                }
            }
        }
        check_triangles(&flat, n, diam)?;
        Ok(Self {
            n,
            model: Model::Explicit,
            store: DistStore::Dense(flat),
            weights,
            adjacency: None,
            diam,
        })
    }

    /// Builds an axis-aligned Euclidean grid; weights default to the cell
    /// volume `spacing^dim` per point.
    pub fn euclidean_grid(shape: &[usize], spacing: R, origin: &[R]) -> Result<Self, SpaceError> {
        if shape.is_empty() || shape.iter().any(|&s| s == 0) {
            return Err(SpaceError::BadModel("grid shape must be nonempty".into()));
        }
        if origin.len() != shape.len() {
            return Err(SpaceError::BadModel("origin rank mismatch".into()));
        }
        if !(spacing > R::zero()) {
            return Err(SpaceError::BadModel("grid spacing must be positive".into()));
        }
        let n: usize = shape.iter().product();
        let cell = shape
            .iter()
            .fold(R::one(), |acc, _| acc * spacing);
        let weights = vec![cell; n];
        let mut sq = R::zero();
        for &s in shape {
            let span = R::of_usize(s - 1) * spacing;
            sq = sq + span * span;
        }
        Ok(Self {
            n,
            model: Model::EuclideanGrid {
                shape: shape.to_vec(),
                spacing,
                origin: origin.to_vec(),
            },
            store: DistStore::Grid,
            weights,
            adjacency: None,
            diam: sq.sqrt(),
        })
    }

    /// Replaces the reference weights.
    pub fn with_weights(mut self, weights: Vec<R>) -> Result<Self, SpaceError> {
        check_weights(&weights, self.n)?;
        self.weights = weights;
        Ok(self)
    }

    /// Builds `n` equispaced points on a circle of the given radius with the
    /// arc-length metric; weights default to the arc length per point.
    pub fn circle(radius: R, n: usize) -> Result<Self, SpaceError> {
        if n < 3 {
            return Err(SpaceError::BadModel("circle needs at least 3 points".into()));
        }
        if !(radius > R::zero()) {
            return Err(SpaceError::BadModel("circle radius must be positive".into()));
        }
        let step = R::TAU() * radius / R::of_usize(n);
        let weights = vec![step; n];
        let half = n / 2;
        let diam = R::TAU() * radius * R::of_usize(half) / R::of_usize(n);
        Ok(Self {
            n,
            model: Model::Circle { radius, n },
            store: DistStore::Circle,
            weights,
            adjacency: None,
            diam,
        })
    }

    /// Builds a graph space on `n` nodes; the metric is the shortest-path
    /// metric, computed by Dijkstra from every node. Weights default to 1.
    pub fn weighted_graph(
        n: usize,
        edges: &[(usize, usize, R)],
    ) -> Result<Self, SpaceError> {
        let mut adj: Vec<Vec<(usize, R)>> = vec![Vec::new(); n];
        for &(i, j, len) in edges {
            if i >= n || j >= n {
                return Err(SpaceError::IndexOutOfRange { i: i.max(j), n });
            }
            if i == j {
                return Err(SpaceError::BadModel(format!("self-loop at {i}")));
            }
            if !(len > R::zero()) {
                return Err(SpaceError::NonpositiveEdge { i, j });
            }
            adj[i].push((j, len));
            adj[j].push((i, len));
        }
        for row in adj.iter_mut() {
            row.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut flat = vec![R::infinity(); n * n];
        let mut diam = R::zero();
        for s in 0..n {
            let (dist, _) = dijkstra(&adj, s);
            for (j, &d) in dist.iter().enumerate() {
                if d == R::infinity() {
                    return Err(SpaceError::Disconnected { i: s, j });
                }
                flat[s * n + j] = d;
                if d > diam {
                    diam = d;
                }
            }
        }
        // Dijkstra from both endpoints can disagree in the last ulp; keep the
        // matrix exactly symmetric by folding to the upper triangle.
        for i in 0..n {
            for j in (i + 1)..n {
                let d = flat[i * n + j];
                flat[j * n + i] = d;
            }
        }
        Ok(Self {
            n,
            model: Model::WeightedGraph {
                edges: edges.to_vec(),
            },
            store: DistStore::Dense(flat),
            weights: vec![R::one(); n],
            adjacency: Some(adj),
            diam,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn model(&self) -> &Model<R> {
        &self.model
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> R {
        self.weights[i]
    }

    pub fn total_weight(&self) -> R {
        stable_sum(&self.weights)
    }

    pub fn diam(&self) -> R {
        self.diam
    }

    /// Distance between points `i` and `j`.
    pub fn d(&self, i: usize, j: usize) -> R {
        match &self.store {
            DistStore::Dense(flat) => flat[i * self.n + j],
            DistStore::Grid => {
                let (shape, spacing, _) = self.grid_params();
                let mut sq = R::zero();
                let mut a = i;
                let mut b = j;
                for &s in shape.iter().rev() {
                    let da = a % s;
                    let db = b % s;
                    a /= s;
                    b /= s;
                    let delta = if da >= db { da - db } else { db - da };
                    let dx = R::of_usize(delta) * spacing;
                    sq = sq + dx * dx;
                }
                sq.sqrt()
            }
            DistStore::Circle => {
                let (radius, n) = self.circle_params();
                let k = if i >= j { i - j } else { j - i };
                let k = k.min(n - k);
                R::TAU() * radius * R::of_usize(k) / R::of_usize(n)
            }
        }
    }

    fn grid_params(&self) -> (&[usize], R, &[R]) {
        match &self.model {
            Model::EuclideanGrid {
                shape,
                spacing,
                origin,
            } => (shape, *spacing, origin),
            _ => unreachable!("grid params on non-grid model"),
        }
    }

    fn circle_params(&self) -> (R, usize) {
        match &self.model {
            Model::Circle { radius, n } => (*radius, *n),
            _ => unreachable!("circle params on non-circle model"),
        }
    }

    /// Ambient coordinates of point `i` for grid and circle models (the
    /// circle coordinate is the angle).
    pub fn coord(&self, i: usize) -> Option<Vec<R>> {
        match &self.model {
            Model::EuclideanGrid { shape, spacing, origin } => {
                let mut rest = i;
                let mut multi = vec![0usize; shape.len()];
                for (axis, &s) in shape.iter().enumerate().rev() {
                    multi[axis] = rest % s;
                    rest /= s;
                }
                Some(
                    multi
                        .iter()
                        .zip(origin.iter())
                        .map(|(&k, &o)| o + R::of_usize(k) * *spacing)
                        .collect(),
                )
            }
            Model::Circle { n, .. } => {
                Some(vec![R::TAU() * R::of_usize(i) / R::of_usize(*n)])
            }
            _ => None,
        }
    }

    /// Row-major index of a grid multi-index.
    pub fn grid_index(&self, multi: &[usize]) -> usize {
        let (shape, _, _) = self.grid_params();
        let mut idx = 0;
        for (axis, &k) in multi.iter().enumerate() {
            idx = idx * shape[axis] + k;
        }
        idx
    }

    /// Nearest point of the space to a position, with the snap distance.
    pub fn nearest(&self, pos: &Position<R>) -> (usize, R) {
        match pos {
            Position::Index(i) => (*i, R::zero()),
            Position::Coord(c) => match &self.model {
                Model::EuclideanGrid { shape, spacing, origin } => {
                    let mut idx = 0usize;
                    let mut snap_sq = R::zero();
                    for axis in 0..shape.len() {
                        let raw = (c[axis] - origin[axis]) / *spacing;
                        let mut k = raw.round();
                        if k < R::zero() {
                            k = R::zero();
                        }
                        let max = R::of_usize(shape[axis] - 1);
                        if k > max {
                            k = max;
                        }
                        let ku = k.to_usize().expect("grid index fits");
                        let delta = c[axis] - (origin[axis] + k * *spacing);
                        snap_sq = snap_sq + delta * delta;
                        idx = idx * shape[axis] + ku;
                    }
                    (idx, snap_sq.sqrt())
                }
                Model::Circle { radius, n } => {
                    let step = R::TAU() / R::of_usize(*n);
                    let raw = c[0] / step;
                    let k = raw.round();
                    let ku = {
                        let m = R::of_usize(*n);
                        let wrapped = k - (k / m).floor() * m;
                        wrapped.to_usize().unwrap_or(0) % *n
                    };
                    let target = step * R::of_usize(ku);
                    let diff = wrap_angle(c[0] - target);
                    (ku, diff.abs() * *radius)
                }
                _ => unreachable!("coordinate position on matrix-backed space"),
            },
        }
    }

    /// Distance between two positions, interpreting coordinates through the
    /// model's metric.
    pub fn position_distance(&self, a: &Position<R>, b: &Position<R>) -> R {
        match (a, b) {
            (Position::Index(i), Position::Index(j)) => self.d(*i, *j),
            _ => {
                let ca = self.position_coord(a);
                let cb = self.position_coord(b);
                match &self.model {
                    Model::EuclideanGrid { .. } => {
                        let mut sq = R::zero();
                        for (x, y) in ca.iter().zip(cb.iter()) {
                            let dx = *x - *y;
                            sq = sq + dx * dx;
                        }
                        sq.sqrt()
                    }
                    Model::Circle { radius, .. } => wrap_angle(ca[0] - cb[0]).abs() * *radius,
                    _ => unreachable!("coordinate positions on matrix-backed space"),
                }
            }
        }
    }

    fn position_coord(&self, p: &Position<R>) -> Vec<R> {
        match p {
            Position::Coord(c) => c.clone(),
            Position::Index(i) => self.coord(*i).expect("model-backed coordinates"),
        }
    }

    /// The set of `t`-intermediate points between `x` and `y`: all `z` with
    /// `d(x,z) = t d(x,y)` and `d(z,y) = (1-t) d(x,y)`, each within `tol`
    /// plus float slack. Returns indices in ascending order.
    pub fn midpoint_set(&self, x: usize, y: usize, t: R, tol: R) -> Vec<usize> {
        let dxy = self.d(x, y);
        let slack = eps_slack(self.diam);
        let ta = t * dxy;
        let tb = (R::one() - t) * dxy;
        (0..self.n)
            .filter(|&z| {
                (self.d(x, z) - ta).abs() <= tol + slack
                    && (self.d(z, y) - tb).abs() <= tol + slack
            })
            .collect()
    }

    /// Default tolerance for [`midpoint_set`](Self::midpoint_set): half the
    /// resolution on lattice-like models, zero (float slack only) on
    /// closed-form models.
    pub fn default_midpoint_tol(&self) -> R {
        match &self.model {
            Model::EuclideanGrid { spacing, .. } => *spacing / R::of(2.0),
            Model::WeightedGraph { edges } => {
                let mut min_edge = R::infinity();
                for &(_, _, len) in edges {
                    if len < min_edge {
                        min_edge = len;
                    }
                }
                min_edge / R::of(2.0)
            }
            _ => R::zero(),
        }
    }

    /// Constant-speed geodesic from `x` to `y`.
    ///
    /// On the circle an antipodal pair has two minimal arcs; the positive
    /// (counterclockwise) one is chosen. `x == y` yields a stationary path.
    pub fn geodesic(&self, x: usize, y: usize) -> Result<Geodesic<R>, SpaceError> {
        self.check_index(x)?;
        self.check_index(y)?;
        if x == y {
            return Ok(Geodesic {
                a: x,
                b: y,
                length: R::zero(),
                kind: GeoKind::Stationary,
            });
        }
        match &self.model {
            Model::EuclideanGrid { .. } => Ok(Geodesic {
                a: x,
                b: y,
                length: self.d(x, y),
                kind: GeoKind::Segment {
                    xa: self.coord(x).unwrap(),
                    xb: self.coord(y).unwrap(),
                },
            }),
            Model::Circle { n, .. } => {
                let n = *n;
                let fwd = (y + n - x) % n;
                let back = n - fwd;
                let step = R::TAU() / R::of_usize(n);
                // Ties (antipodal pairs) take the counterclockwise arc.
                let dtheta = if fwd <= back {
                    step * R::of_usize(fwd)
                } else {
                    -step * R::of_usize(back)
                };
                Ok(Geodesic {
                    a: x,
                    b: y,
                    length: self.d(x, y),
                    kind: GeoKind::Arc {
                        theta_a: R::TAU() * R::of_usize(x) / R::of_usize(n),
                        dtheta,
                    },
                })
            }
            Model::WeightedGraph { .. } => {
                let adj = self.adjacency.as_ref().expect("graph adjacency");
                let (dist, pred) = dijkstra(adj, x);
                if dist[y] == R::infinity() {
                    return Err(SpaceError::Disconnected { i: x, j: y });
                }
                let mut nodes = vec![y];
                let mut cur = y;
                while cur != x {
                    cur = pred[cur].expect("predecessor chain reaches source");
                    nodes.push(cur);
                }
                nodes.reverse();
                let mut cum = Vec::with_capacity(nodes.len());
                cum.push(R::zero());
                for w in nodes.windows(2) {
                    let prev = *cum.last().unwrap();
                    cum.push(prev + self.edge_len(adj, w[0], w[1]));
                }
                Ok(Geodesic {
                    a: x,
                    b: y,
                    length: dist[y],
                    kind: GeoKind::NodePath { nodes, cum },
                })
            }
            Model::Explicit => Err(SpaceError::NoModelGeodesic),
        }
    }

    fn edge_len(&self, adj: &[Vec<(usize, R)>], i: usize, j: usize) -> R {
        adj[i]
            .iter()
            .filter(|(k, _)| *k == j)
            .map(|(_, len)| *len)
            .fold(R::infinity(), |a, b| if b < a { b } else { a })
    }

    /// Samples a geodesic at the given parameters.
    pub fn geodesic_path(
        &self,
        x: usize,
        y: usize,
        times: &[R],
    ) -> Result<GeodesicPath<R>, SpaceError> {
        let geo = self.geodesic(x, y)?;
        let points = times.iter().map(|&t| geo.eval(t)).collect();
        Ok(GeodesicPath {
            times: times.to_vec(),
            points,
            length: geo.length,
        })
    }

    /// Local slopes of a function over the space.
    ///
    /// For each point the slope is the maximal difference quotient over
    /// neighbors within `radius`; the ascending and descending variants use
    /// the positive and negative parts of the increment. Errors if any point
    /// has no neighbor in range.
    pub fn slopes(&self, f: &[R], radius: R) -> Result<SlopeField<R>, SpaceError> {
        assert_eq!(f.len(), self.n, "slope input length");
        let mut abs = vec![R::zero(); self.n];
        let mut asc = vec![R::zero(); self.n];
        let mut desc = vec![R::zero(); self.n];
        for i in 0..self.n {
            let mut seen = false;
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                let d = self.d(i, j);
                if d <= R::zero() || d > radius {
                    continue;
                }
                seen = true;
                let q = (f[j] - f[i]) / d;
                if q.abs() > abs[i] {
                    abs[i] = q.abs();
                }
                if q > asc[i] {
                    asc[i] = q;
                }
                if -q > desc[i] {
                    desc[i] = -q;
                }
            }
            if !seen {
                return Err(SpaceError::EmptyNeighborhood {
                    i,
                    radius: radius.as_f64(),
                });
            }
        }
        Ok(SlopeField {
            radius,
            abs,
            ascending: asc,
            descending: desc,
        })
    }

    /// Grid-interior mask: true where every axis neighbor exists.
    pub fn grid_interior(&self) -> Option<Vec<bool>> {
        match &self.model {
            Model::EuclideanGrid { shape, .. } => {
                let mut mask = vec![true; self.n];
                for i in 0..self.n {
                    let mut rest = i;
                    for &s in shape.iter().rev() {
                        let k = rest % s;
                        rest /= s;
                        if k == 0 || k + 1 == s {
                            mask[i] = false;
                        }
                    }
                }
                Some(mask)
            }
            _ => None,
        }
    }

    /// Axis neighbors `(minus, plus)` of a grid point, per axis.
    pub fn grid_axis_neighbors(&self, i: usize) -> Option<Vec<(Option<usize>, Option<usize>)>> {
        match &self.model {
            Model::EuclideanGrid { shape, .. } => {
                let dim = shape.len();
                let mut multi = vec![0usize; dim];
                let mut rest = i;
                for (axis, &s) in shape.iter().enumerate().rev() {
                    multi[axis] = rest % s;
                    rest /= s;
                }
                let mut out = Vec::with_capacity(dim);
                for axis in 0..dim {
                    let minus = if multi[axis] > 0 {
                        let mut m = multi.clone();
                        m[axis] -= 1;
                        Some(self.grid_index(&m))
                    } else {
                        None
                    };
                    let plus = if multi[axis] + 1 < shape[axis] {
                        let mut m = multi.clone();
                        m[axis] += 1;
                        Some(self.grid_index(&m))
                    } else {
                        None
                    };
                    out.push((minus, plus));
                }
                Some(out)
            }
            _ => None,
        }
    }

    fn check_index(&self, i: usize) -> Result<(), SpaceError> {
        if i >= self.n {
            Err(SpaceError::IndexOutOfRange { i, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Constant-speed geodesic between two points of a model-backed space.
pub struct Geodesic<R: Real> {
    pub a: usize,
    pub b: usize,
    pub length: R,
    kind: GeoKind<R>,
}

enum GeoKind<R: Real> {
    Stationary,
    Segment { xa: Vec<R>, xb: Vec<R> },
    Arc { theta_a: R, dtheta: R },
    NodePath { nodes: Vec<usize>, cum: Vec<R> },
}

impl<R: Real> Geodesic<R> {
    /// Evaluates the path at parameter `t in [0,1]`.
    ///
    /// Returns the position together with the distance the evaluation had to
    /// move to express the point (zero except mid-edge on graphs). Endpoint
    /// parameters return the endpoint indices exactly.
    pub fn eval(&self, t: R) -> (Position<R>, R) {
        if t <= R::zero() {
            return (Position::Index(self.a), R::zero());
        }
        if t >= R::one() {
            return (Position::Index(self.b), R::zero());
        }
        match &self.kind {
            GeoKind::Stationary => (Position::Index(self.a), R::zero()),
            GeoKind::Segment { xa, xb } => {
                let c = xa
                    .iter()
                    .zip(xb.iter())
                    .map(|(&p, &q)| (R::one() - t) * p + t * q)
                    .collect();
                (Position::Coord(c), R::zero())
            }
            GeoKind::Arc { theta_a, dtheta } => {
                (Position::Coord(vec![*theta_a + t * *dtheta]), R::zero())
            }
            GeoKind::NodePath { nodes, cum } => {
                let s = t * self.length;
                let mut k = 0;
                while k + 1 < cum.len() && cum[k + 1] < s {
                    k += 1;
                }
                // s lies on the edge (nodes[k], nodes[k+1]); snap to the
                // nearer endpoint.
                let lo = s - cum[k];
                let hi = cum[k + 1] - s;
                if lo <= hi {
                    (Position::Index(nodes[k]), lo)
                } else {
                    (Position::Index(nodes[k + 1]), hi)
                }
            }
        }
    }
}

/// A geodesic sampled at a list of parameters.
pub struct GeodesicPath<R: Real> {
    pub times: Vec<R>,
    /// Evaluated positions with their snap distances.
    pub points: Vec<(Position<R>, R)>,
    pub length: R,
}

/// Slopes of a function over a space at a fixed neighborhood radius.
pub struct SlopeField<R: Real> {
    pub radius: R,
    /// |Df|: largest absolute difference quotient.
    pub abs: Vec<R>,
    /// |D^+ f|: largest positive part of the quotient.
    pub ascending: Vec<R>,
    /// |D^- f|: largest negative part of the quotient.
    pub descending: Vec<R>,
}

fn wrap_angle<R: Real>(a: R) -> R {
    let tau = R::TAU();
    let mut x = a % tau;
    if x > tau / R::of(2.0) {
        x = x - tau;
    }
    if x < -tau / R::of(2.0) {
        x = x + tau;
    }
    x
}

fn check_weights<R: Real>(weights: &[R], n: usize) -> Result<(), SpaceError> {
    if weights.len() != n {
        return Err(SpaceError::WeightLength {
            got: weights.len(),
            expected: n,
        });
    }
    for (i, &w) in weights.iter().enumerate() {
        if w < R::zero() || !w.is_finite() {
            return Err(SpaceError::NegativeWeight { i });
        }
    }
    Ok(())
}

fn check_triangles<R: Real>(flat: &[R], n: usize, diam: R) -> Result<(), SpaceError> {
    let slack = eps_slack(diam);
    let d = |i: usize, j: usize| flat[i * n + j];
    if n <= 300 {
        for i in 0..n {
            for j in 0..n {
                let dij = d(i, j);
                for k in 0..n {
                    if dij > d(i, k) + d(k, j) + slack {
                        return Err(SpaceError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
    } else {
        let mut rng = crate::rng::task_rng(0x7a11_5eed, 0);
        for _ in 0..1_000_000 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let k = rng.gen_range(0..n);
            if d(i, j) > d(i, k) + d(k, j) + slack {
                return Err(SpaceError::TriangleViolation { i, j, k });
            }
        }
    }
    Ok(())
}

fn dijkstra<R: Real>(adj: &[Vec<(usize, R)>], src: usize) -> (Vec<R>, Vec<Option<usize>>) {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    struct Item<R>(R, usize);
    impl<R: Real> PartialEq for Item<R> {
        fn eq(&self, o: &Self) -> bool {
            self.0 == o.0 && self.1 == o.1
        }
    }
    impl<R: Real> Eq for Item<R> {}
    impl<R: Real> Ord for Item<R> {
        fn cmp(&self, o: &Self) -> Ordering {
            // Min-heap by distance, then by node id for determinism.
            o.0.partial_cmp(&self.0)
                .unwrap()
                .then_with(|| o.1.cmp(&self.1))
        }
    }
    impl<R: Real> PartialOrd for Item<R> {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }

    let n = adj.len();
    let mut dist = vec![R::infinity(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = R::zero();
    heap.push(Item(R::zero(), src));
    while let Some(Item(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(v, len) in &adj[u] {
            let nd = d + len;
            // Strict improvement or an equal-length path through a smaller
            // predecessor keeps the tree deterministic.
            if nd < dist[v] || (nd == dist[v] && pred[v].map_or(false, |p| u < p)) {
                dist[v] = nd;
                pred[v] = Some(u);
                heap.push(Item(nd, v));
            }
        }
    }
    (dist, pred)
}

//! Combinatorial curve models: skeleta as finite metric graphs with genus
//! marks, the genus formula, nodes and classification, plus trees of closed
//! unit disks carrying the two Kobayashi-type semi-distances.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::ValueGroup;
use crate::rational::{format, Rational};

fn zero() -> Rational {
    Rational::from_integer(0.into())
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// `2 - 2g - #punctures`.
pub fn euler_characteristic(genus: u64, punctures: u64) -> i64 {
    2 - 2 * genus as i64 - punctures as i64
}

/// A rigid coordinate in a closed unit disk, written as a finite sum
/// `Σ c_s u_s` of symbols with `|u_s| = s`, `0 < s <= 1`. Two coordinates are
/// at distance `max { s : their coefficients at s differ }`, which is an
/// ultrametric with values in the positive rationals. This lets magnitudes
/// such as `1/n` be represented exactly, which no value group `β^Q` does.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiskCoord(BTreeMap<Rational, Rational>);

impl DiskCoord {
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (s, c) in pairs {
            if s <= zero() || s > one() {
                return Err(Error::InvalidInput(format!(
                    "magnitude {} outside (0, 1]",
                    format(&s)
                )));
            }
            if map.insert(s.clone(), c.clone()).is_some() {
                return Err(Error::InvalidInput(format!("magnitude {} repeated", format(&s))));
            }
            if c == zero() {
                map.remove(&s);
            }
        }
        Ok(DiskCoord(map))
    }

    pub fn zero() -> Self {
        DiskCoord::default()
    }

    /// The single-term coordinate `u_s`, of absolute value `s`.
    pub fn at_distance(s: Rational) -> Result<Self> {
        DiskCoord::new([(s, one())])
    }

    pub fn terms(&self) -> &BTreeMap<Rational, Rational> {
        &self.0
    }

    pub fn abs(&self) -> Rational {
        self.0.keys().next_back().cloned().unwrap_or_else(zero)
    }

    pub fn dist(&self, other: &DiskCoord) -> Rational {
        let mut keys: Vec<&Rational> = self.0.keys().chain(other.0.keys()).collect();
        keys.sort();
        keys.into_iter()
            .rev()
            .find(|s| self.0.get(*s) != other.0.get(*s))
            .cloned()
            .unwrap_or_else(zero)
    }
}

impl fmt::Display for DiskCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|(s, c)| format!("{}·u[{}]", format(c), format(s)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

type Adjacency = Vec<Vec<usize>>;

/// A semi-distance value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dist {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(q) => write!(f, "{}", format(q)),
            Dist::Infinity => write!(f, "inf"),
        }
    }
}

/// How many disk maps a Kobayashi chain may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainBudget {
    Unbounded,
    MaxMaps(usize),
}

impl ChainBudget {
    /// Reads `BERKLINE_MAX_CHAIN`; unset means unbounded.
    pub fn from_env() -> Result<Self> {
        match std::env::var("BERKLINE_MAX_CHAIN") {
            Err(_) => Ok(ChainBudget::Unbounded),
            Ok(s) => s
                .trim()
                .parse()
                .map(ChainBudget::MaxMaps)
                .map_err(|_| Error::InvalidInput(format!("BERKLINE_MAX_CHAIN={s}"))),
        }
    }
}

/// Two disks glued at one rigid point of each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub first: String,
    pub at_first: DiskCoord,
    pub second: String,
    pub at_second: DiskCoord,
}

/// A space built from closed unit disks glued at rigid points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeOfDisks {
    disks: Vec<String>,
    attachments: Vec<Attachment>,
    marks: BTreeMap<String, (String, DiskCoord)>,
    // derived: ports are the distinct special points of each disk
    ports: Vec<(usize, DiskCoord)>,
    gluings: Vec<(usize, usize)>,
    mark_ports: BTreeMap<String, usize>,
}

impl TreeOfDisks {
    pub fn new(
        disks: Vec<String>,
        attachments: Vec<Attachment>,
        marks: Vec<(String, String, DiskCoord)>,
    ) -> Result<Self> {
        let index: BTreeMap<&str, usize> =
            disks.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
        if index.len() != disks.len() {
            return Err(Error::InvalidInput("disk names repeated".into()));
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("unknown disk {name}")))
        };
        let mut ports: Vec<(usize, DiskCoord)> = Vec::new();
        let mut port_index: BTreeMap<(usize, DiskCoord), usize> = BTreeMap::new();
        let mut port = |disk: usize, c: &DiskCoord| {
            *port_index.entry((disk, c.clone())).or_insert_with(|| {
                ports.push((disk, c.clone()));
                ports.len() - 1
            })
        };
        let mut gluings = Vec::new();
        for a in &attachments {
            let (i, j) = (lookup(&a.first)?, lookup(&a.second)?);
            if i == j {
                return Err(Error::InvalidInput(format!("disk {} glued to itself", a.first)));
            }
            gluings.push((port(i, &a.at_first), port(j, &a.at_second)));
        }
        let mut mark_map = BTreeMap::new();
        let mut mark_ports = BTreeMap::new();
        for (name, disk, c) in marks {
            let i = lookup(&disk)?;
            mark_ports.insert(name.clone(), port(i, &c));
            if mark_map.insert(name.clone(), (disk, c)).is_some() {
                return Err(Error::InvalidInput(format!("mark {name} repeated")));
            }
        }
        Ok(TreeOfDisks {
            disks,
            attachments,
            marks: mark_map,
            ports,
            gluings,
            mark_ports,
        })
    }

    /// The truncated chained-disks space: a disk `D` with marks `x = 0` and
    /// `y` at distance 1, a disk `X1` glued at `x`, a disk `Y` glued at `y`,
    /// and for every `3 <= n <= n_max` a chain of `n` disks from `X1` to `Y`
    /// whose consecutive gluing points are `1/n` apart.
    pub fn chained_disks(n_max: u32) -> Result<Self> {
        let mut disks = vec!["D".to_string(), "X1".to_string(), "Y".to_string()];
        let glue = |a: &str, ca: DiskCoord, b: &str, cb: DiskCoord| Attachment {
            first: a.into(),
            at_first: ca,
            second: b.into(),
            at_second: cb,
        };
        let mut attachments = vec![
            glue("D", DiskCoord::zero(), "X1", DiskCoord::zero()),
            glue("D", DiskCoord::at_distance(one())?, "Y", DiskCoord::zero()),
        ];
        for n in 3..=n_max {
            let step = DiskCoord::at_distance(Rational::new(1.into(), n.into()))?;
            let mut prev = ("X1".to_string(), step.clone());
            for l in 2..n {
                let name = format!("X{l}_{n}");
                disks.push(name.clone());
                attachments.push(glue(&prev.0, prev.1, &name, DiskCoord::zero()));
                prev = (name, step.clone());
            }
            attachments.push(glue(&prev.0, prev.1, "Y", step.clone()));
        }
        let marks = vec![
            ("x".into(), "D".into(), DiskCoord::zero()),
            ("y".into(), "D".into(), DiskCoord::at_distance(one())?),
        ];
        TreeOfDisks::new(disks, attachments, marks)
    }

    pub fn disks(&self) -> &[String] {
        &self.disks
    }

    pub fn attachments(&self) -> &[Attachment] {
        &self.attachments
    }

    pub fn marks(&self) -> &BTreeMap<String, (String, DiskCoord)> {
        &self.marks
    }

    fn mark(&self, name: &str) -> Result<usize> {
        self.mark_ports
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownMark(name.into()))
    }

    /// Neighbours of a port: one step inside its disk (weight, counts as a
    /// map) and free hops across gluings.
    fn moves(&self) -> (Vec<Vec<(usize, Rational)>>, Adjacency) {
        let mut inside = vec![Vec::new(); self.ports.len()];
        for (i, (di, ci)) in self.ports.iter().enumerate() {
            for (j, (dj, cj)) in self.ports.iter().enumerate() {
                if i != j && di == dj {
                    inside[i].push((j, ci.dist(cj)));
                }
            }
        }
        let mut glued = vec![Vec::new(); self.ports.len()];
        for &(a, b) in &self.gluings {
            glued[a].push(b);
            glued[b].push(a);
        }
        (inside, glued)
    }

    fn semi_distance(&self, x: &str, y: &str, budget: ChainBudget, combine: Combine) -> Result<Dist> {
        let (from, to) = (self.mark(x)?, self.mark(y)?);
        let (inside, glued) = self.moves();
        let best = match budget {
            ChainBudget::Unbounded => dijkstra(from, &inside, &glued, combine),
            ChainBudget::MaxMaps(k) => layered(from, &inside, &glued, combine, k),
        };
        Ok(best[to].clone().map_or(Dist::Infinity, Dist::Finite))
    }
}

#[derive(Debug, Clone, Copy)]
enum Combine {
    Sum,
    Max,
}

impl Combine {
    fn apply(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            Combine::Sum => a + b,
            Combine::Max => a.max(b).clone(),
        }
    }
}

fn close_under_gluing(best: &mut [Option<Rational>], glued: &[Vec<usize>], seeds: Vec<usize>) {
    let mut stack = seeds;
    while let Some(p) = stack.pop() {
        let v = best[p].clone().expect("seeded");
        for &q in &glued[p] {
            if best[q].as_ref().is_none_or(|w| v < *w) {
                best[q] = Some(v.clone());
                stack.push(q);
            }
        }
    }
}

fn dijkstra(
    from: usize,
    inside: &[Vec<(usize, Rational)>],
    glued: &[Vec<usize>],
    combine: Combine,
) -> Vec<Option<Rational>> {
    let mut best: Vec<Option<Rational>> = vec![None; inside.len()];
    let mut done = vec![false; inside.len()];
    let mut heap = BinaryHeap::new();
    best[from] = Some(zero());
    heap.push(Reverse((zero(), from)));
    while let Some(Reverse((d, p))) = heap.pop() {
        if done[p] {
            continue;
        }
        done[p] = true;
        let next = inside[p]
            .iter()
            .map(|(q, w)| (*q, combine.apply(&d, w)))
            .chain(glued[p].iter().map(|q| (*q, d.clone())));
        for (q, v) in next {
            if best[q].as_ref().is_none_or(|w| v < *w) {
                best[q] = Some(v.clone());
                heap.push(Reverse((v, q)));
            }
        }
    }
    best
}

/// Best values over chains using at most `k` disk maps.
fn layered(
    from: usize,
    inside: &[Vec<(usize, Rational)>],
    glued: &[Vec<usize>],
    combine: Combine,
    k: usize,
) -> Vec<Option<Rational>> {
    let mut best: Vec<Option<Rational>> = vec![None; inside.len()];
    best[from] = Some(zero());
    close_under_gluing(&mut best, glued, vec![from]);
    for _ in 0..k {
        let mut next = best.clone();
        let mut changed = Vec::new();
        for (p, v) in best.iter().enumerate() {
            let Some(v) = v else { continue };
            for (q, w) in &inside[p] {
                let c = combine.apply(v, w);
                if next[*q].as_ref().is_none_or(|old| c < *old) {
                    next[*q] = Some(c);
                    changed.push(*q);
                }
            }
        }
        close_under_gluing(&mut next, glued, changed);
        if next == best {
            break;
        }
        best = next;
    }
    best
}

/// Infimum over chains of the sum of step sizes.
pub fn dck_tree(t: &TreeOfDisks, x: &str, y: &str, budget: ChainBudget) -> Result<Dist> {
    t.semi_distance(x, y, budget, Combine::Sum)
}

/// Infimum over chains of the largest step size.
pub fn d_tree(t: &TreeOfDisks, x: &str, y: &str, budget: ChainBudget) -> Result<Dist> {
    t.semi_distance(x, y, budget, Combine::Max)
}

/// A vertex of a skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub genus: u64,
    /// Non-discal directions beyond the skeleton edges and punctures.
    pub extra_directions: u64,
    pub boundary: bool,
}

impl Vertex {
    pub fn new(name: &str, genus: u64) -> Self {
        Vertex {
            name: name.into(),
            genus,
            extra_directions: 0,
            boundary: false,
        }
    }
}

/// An edge of positive rational length; `ends` may coincide (a loop).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub ends: (String, String),
    pub length: Rational,
}

impl Edge {
    pub fn new(a: &str, b: &str, length: Rational) -> Self {
        Edge {
            ends: (a.into(), b.into()),
            length,
        }
    }
}

/// A point of the skeleton: a vertex, or an interior point of an edge at
/// distance `position` from its first end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkeletonPoint {
    Vertex(String),
    Edge { edge: usize, position: Rational },
}

impl fmt::Display for SkeletonPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkeletonPoint::Vertex(v) => write!(f, "{v}"),
            SkeletonPoint::Edge { edge, position } => write!(f, "e{edge}@{}", format(position)),
        }
    }
}

/// A point of a curve model for retraction purposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelPoint {
    Skeleton(SkeletonPoint),
    Disk(String),
}

/// Classification of a projective curve from its skeleton and nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    ProjectiveLine,
    TateCurve,
    GoodReduction(u64),
    OneNodeWithLoops(u64),
    MultiNode(u64),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::ProjectiveLine => write!(f, "projective-line"),
            Classification::TateCurve => write!(f, "tate-curve"),
            Classification::GoodReduction(g) => write!(f, "good-reduction({g})"),
            Classification::OneNodeWithLoops(g) => write!(f, "one-node-with-loops({g})"),
            Classification::MultiNode(g) => write!(f, "multi-node({g})"),
        }
    }
}

/// A segment of the skeleton between nodes: an annulus `A(1, R)` with
/// `log R = length`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonSegment {
    pub from: String,
    pub to: String,
    pub length: Rational,
    /// The closure is a circle through a single node.
    pub circle: bool,
}

/// Skeleton minus nodes. Besides the listed annuli the complement of the
/// nodes contains infinitely many open unit disks; they are not listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub nodes: Vec<String>,
    pub segments: Vec<SkeletonSegment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Graph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize, Rational)>,
    punctures: Vec<u64>,
}

impl Graph {
    fn degree(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .map(|(a, b, _)| (*a == v) as u64 + (*b == v) as u64)
            .sum()
    }

    fn directions(&self, v: usize) -> u64 {
        self.degree(v) + self.vertices[v].extra_directions + self.punctures[v]
    }

    fn is_node(&self, v: usize) -> bool {
        let x = &self.vertices[v];
        x.genus > 0 || x.boundary || self.directions(v) >= 3
    }

    fn connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (a, b, _) in &self.edges {
                for (u, w) in [(a, b), (b, a)] {
                    if *u == v && !seen[*w] {
                        seen[*w] = true;
                        stack.push(*w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A curve model: skeleton, genus marks, punctures and the closed disk
/// components hanging off the skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    punctures: Vec<SkeletonPoint>,
    disks: BTreeMap<String, SkeletonPoint>,
    graph: Graph,
}

impl CurveModel {
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        punctures: Vec<SkeletonPoint>,
        disks: Vec<(String, SkeletonPoint)>,
    ) -> Result<Self> {
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        if index.len() != vertices.len() {
            return Err(Error::InvalidInput("vertex names repeated".into()));
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("unknown vertex {name}")))
        };
        let mut graph_edges = Vec::new();
        for e in &edges {
            if e.length <= zero() {
                return Err(Error::InvalidInput("edge lengths must be positive".into()));
            }
            graph_edges.push((lookup(&e.ends.0)?, lookup(&e.ends.1)?, e.length.clone()));
        }
        let check_point = |p: &SkeletonPoint| -> Result<()> {
            match p {
                SkeletonPoint::Vertex(v) => lookup(v).map(|_| ()),
                SkeletonPoint::Edge { edge, position } => match edges.get(*edge) {
                    Some(e) if *position > zero() && *position < e.length => Ok(()),
                    _ => Err(Error::InvalidInput(format!("no interior point e{edge}@{}", format(position)))),
                },
            }
        };
        for p in &punctures {
            check_point(p)?;
        }
        let mut disk_map = BTreeMap::new();
        for (name, p) in disks {
            check_point(&p)?;
            if disk_map.insert(name.clone(), p).is_some() {
                return Err(Error::InvalidInput(format!("disk {name} repeated")));
            }
        }
        let graph = subdivide(&vertices, graph_edges, &punctures, &lookup);
        if !graph.connected() {
            return Err(Error::InconsistentModel("skeleton is disconnected".into()));
        }
        for v in 0..graph.vertices.len() {
            let x = &graph.vertices[v];
            if graph.directions(v) <= 1 && x.genus == 0 && !x.boundary {
                return Err(Error::InconsistentModel(format!(
                    "endpoint {} of the skeleton has genus 0",
                    x.name
                )));
            }
        }
        Ok(CurveModel {
            vertices,
            edges,
            punctures,
            disks: disk_map,
            graph,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn punctures(&self) -> &[SkeletonPoint] {
        &self.punctures
    }

    pub fn disks(&self) -> &BTreeMap<String, SkeletonPoint> {
        &self.disks
    }

    pub fn is_projective(&self) -> bool {
        self.punctures.is_empty() && self.vertices.iter().all(|v| !v.boundary)
    }

    pub fn skeleton_is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Splits edges at interior punctures so that every puncture sits on a
/// vertex.
fn subdivide(
    vertices: &[Vertex],
    edges: Vec<(usize, usize, Rational)>,
    punctures: &[SkeletonPoint],
    lookup: &dyn Fn(&str) -> Result<usize>,
) -> Graph {
    let mut vertices = vertices.to_vec();
    let mut counts = vec![0u64; vertices.len()];
    let mut cuts: BTreeMap<usize, BTreeMap<Rational, u64>> = BTreeMap::new();
    for p in punctures {
        match p {
            SkeletonPoint::Vertex(v) => counts[lookup(v).expect("checked")] += 1,
            SkeletonPoint::Edge { edge, position } => {
                *cuts.entry(*edge).or_default().entry(position.clone()).or_default() += 1;
            }
        }
    }
    let mut out = Vec::new();
    for (i, (a, b, len)) in edges.into_iter().enumerate() {
        let Some(points) = cuts.get(&i) else {
            out.push((a, b, len));
            continue;
        };
        let (mut prev, mut at) = (a, zero());
        for (pos, k) in points {
            vertices.push(Vertex::new(&format!("e{i}@{}", format(pos)), 0));
            counts.push(*k);
            let v = vertices.len() - 1;
            out.push((prev, v, pos - &at));
            prev = v;
            at = pos.clone();
        }
        out.push((prev, b, len - at));
    }
    Graph {
        vertices,
        edges: out,
        punctures: counts,
    }
}

/// `b + Σ g(x)` with `b` the first Betti number of the skeleton.
pub fn total_genus(m: &CurveModel) -> Result<u64> {
    if !m.is_projective() {
        return Err(Error::NotProjective);
    }
    let g = &m.graph;
    let components = !g.vertices.is_empty() as i64;
    let betti = g.edges.len() as i64 - g.vertices.len() as i64 + components;
    Ok(betti as u64 + g.vertices.iter().map(|v| v.genus).sum::<u64>())
}

/// Vertices with positive genus, at least three non-discal directions, or
/// on the boundary.
pub fn nodes(m: &CurveModel) -> Vec<String> {
    (0..m.graph.vertices.len())
        .filter(|v| m.graph.is_node(*v))
        .map(|v| m.graph.vertices[v].name.clone())
        .collect()
}

pub fn classify(m: &CurveModel) -> Result<Classification> {
    let genus = total_genus(m)?;
    if m.skeleton_is_empty() {
        return Ok(Classification::ProjectiveLine);
    }
    let ns = nodes(m);
    let label = match ns.len() {
        0 => Classification::TateCurve,
        1 if m.graph.edges.is_empty() => Classification::GoodReduction(genus),
        1 => Classification::OneNodeWithLoops(genus),
        _ => Classification::MultiNode(genus),
    };
    let consistent = match &label {
        Classification::TateCurve => genus == 1,
        Classification::OneNodeWithLoops(g) | Classification::MultiNode(g) => *g >= 2,
        Classification::GoodReduction(g) => *g >= 1,
        Classification::ProjectiveLine => true,
    };
    if !consistent {
        return Err(Error::InconsistentModel(format!("{label} with total genus {genus}")));
    }
    Ok(label)
}

pub fn decompose(m: &CurveModel) -> Result<Decomposition> {
    let g = &m.graph;
    let is_node: Vec<bool> = (0..g.vertices.len()).map(|v| g.is_node(v)).collect();
    if !is_node.iter().any(|n| *n) {
        return Err(Error::NoNodes);
    }
    let mut used = vec![false; g.edges.len()];
    let mut segments = Vec::new();
    for (start, _) in is_node.iter().enumerate().filter(|(_, n)| **n) {
        for e in 0..g.edges.len() {
            if used[e] || (g.edges[e].0 != start && g.edges[e].1 != start) {
                continue;
            }
            let (mut at, mut edge, mut length) = (start, e, zero());
            loop {
                used[edge] = true;
                let (a, b, len) = &g.edges[edge];
                length += len;
                at = if *a == at { *b } else { *a };
                if is_node[at] {
                    break;
                }
                edge = (0..g.edges.len())
                    .find(|f| !used[*f] && (g.edges[*f].0 == at || g.edges[*f].1 == at))
                    .expect("non-node vertices have two directions");
            }
            segments.push(SkeletonSegment {
                from: g.vertices[start].name.clone(),
                to: g.vertices[at].name.clone(),
                length,
                circle: start == at,
            });
        }
    }
    Ok(Decomposition {
        nodes: nodes(m),
        segments,
    })
}

pub fn retract(m: &CurveModel, x: &ModelPoint) -> Result<SkeletonPoint> {
    if m.skeleton_is_empty() {
        return Err(Error::EmptySkeleton);
    }
    match x {
        ModelPoint::Skeleton(p) => Ok(p.clone()),
        ModelPoint::Disk(name) => m
            .disks
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownMark(name.clone())),
    }
}

/// A rigid point of a curve model: a disk component and a coordinate in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub component: String,
    pub coordinate: DiskCoord,
}

/// Kobayashi chains on a curve with nonempty skeleton stay inside one disk
/// component, so `d_CK` is the in-disk distance or infinite.
pub fn dck_curve(m: &CurveModel, x: &CurvePoint, y: &CurvePoint) -> Result<Dist> {
    if m.skeleton_is_empty() {
        return Err(Error::NotHyperbolic);
    }
    for p in [x, y] {
        if !m.disks.contains_key(&p.component) {
            return Err(Error::UnknownMark(p.component.clone()));
        }
    }
    if x.component == y.component {
        Ok(Dist::Finite(x.coordinate.dist(&y.coordinate)))
    } else {
        Ok(Dist::Infinity)
    }
}

/// The data attached to a star-shaped domain: genus of the residue curve
/// and one annulus modulus `log ρ < 0` per non-discal direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarShapedData {
    pub genus: u64,
    pub moduli: Vec<Rational>,
}

impl StarShapedData {
    pub fn new(genus: u64, moduli: Vec<Rational>, value_group: &ValueGroup) -> Result<Self> {
        for q in &moduli {
            if *q >= zero() || !value_group.contains(q) {
                return Err(Error::InvalidInput(format!(
                    "annulus modulus β^({}) must be < 1 and in {value_group}",
                    format(q)
                )));
            }
        }
        if genus == 0 && moduli.len() < 3 {
            return Err(Error::InconsistentModel(
                "the centre of a star-shaped domain must be a node".into(),
            ));
        }
        Ok(StarShapedData { genus, moduli })
    }

    pub fn directions(&self) -> usize {
        self.moduli.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coord(s: Rational) -> DiskCoord {
        DiskCoord::at_distance(s).unwrap()
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic(0, 3), -1);
        assert_eq!(euler_characteristic(1, 0), 0);
        assert_eq!(euler_characteristic(2, 0), -2);
    }

    #[test]
    fn disk_coordinates_are_ultrametric() {
        let a = DiskCoord::new([(frac(1, 2), int(1)), (frac(1, 5), int(3))]).unwrap();
        let b = DiskCoord::new([(frac(1, 2), int(1)), (frac(1, 7), int(3))]).unwrap();
        assert_eq!(a.dist(&b), frac(1, 5));
        assert_eq!(a.abs(), frac(1, 2));
        assert_eq!(a.dist(&a), int(0));
        assert!(DiskCoord::new([(int(2), int(1))]).is_err());
    }

    fn single_disk() -> TreeOfDisks {
        TreeOfDisks::new(
            vec!["D".into()],
            vec![],
            vec![
                ("x".into(), "D".into(), DiskCoord::zero()),
                ("y".into(), "D".into(), coord(frac(1, 2))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn same_disk_distances_agree() {
        let t = single_disk();
        let u = ChainBudget::Unbounded;
        assert_eq!(dck_tree(&t, "x", "y", u).unwrap(), Dist::Finite(frac(1, 2)));
        assert_eq!(d_tree(&t, "x", "y", u).unwrap(), Dist::Finite(frac(1, 2)));
        assert!(matches!(dck_tree(&t, "x", "z", u), Err(Error::UnknownMark(_))));
    }

    #[test]
    fn disconnected_is_infinite() {
        let t = TreeOfDisks::new(
            vec!["A".into(), "B".into()],
            vec![],
            vec![
                ("x".into(), "A".into(), DiskCoord::zero()),
                ("y".into(), "B".into(), DiskCoord::zero()),
            ],
        )
        .unwrap();
        assert_eq!(dck_tree(&t, "x", "y", ChainBudget::Unbounded).unwrap(), Dist::Infinity);
        assert_eq!(d_tree(&t, "x", "y", ChainBudget::Unbounded).unwrap(), Dist::Infinity);
    }

    #[test]
    fn chained_disks_family() {
        for n in [3u32, 4, 5, 10] {
            let t = TreeOfDisks::chained_disks(n).unwrap();
            let u = ChainBudget::Unbounded;
            assert_eq!(dck_tree(&t, "x", "y", u).unwrap(), Dist::Finite(int(1)));
            assert_eq!(d_tree(&t, "x", "y", u).unwrap(), Dist::Finite(frac(1, n as i64)));
            // a chain of n maps is needed to reach 1/n
            let short = ChainBudget::MaxMaps(n as usize - 1);
            assert!(d_tree(&t, "x", "y", short).unwrap() > Dist::Finite(frac(1, n as i64)));
        }
    }

    /// Exhaustive walk enumeration: every sequence of at most `k` in-disk
    /// steps with free gluing hops.
    fn brute(t: &TreeOfDisks, x: &str, y: &str, k: usize, sum: bool) -> Dist {
        let (inside, glued) = t.moves();
        let (from, to) = (t.mark(x).unwrap(), t.mark(y).unwrap());
        let reach = |p: usize| {
            let mut seen = vec![p];
            let mut i = 0;
            while i < seen.len() {
                for &q in &glued[seen[i]] {
                    if !seen.contains(&q) {
                        seen.push(q);
                    }
                }
                i += 1;
            }
            seen
        };
        let mut best: Option<Rational> = None;
        let mut stack = vec![(from, 0usize, int(0))];
        while let Some((p, used, v)) = stack.pop() {
            for q in reach(p) {
                if q == to && best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v.clone());
                }
                if used < k {
                    for (r, w) in &inside[q] {
                        let c = if sum { &v + w } else { v.clone().max(w.clone()) };
                        stack.push((*r, used + 1, c));
                    }
                }
            }
        }
        best.map_or(Dist::Infinity, Dist::Finite)
    }

    fn random_tree(rng: &mut ChaCha8Rng, disks: usize, marks: usize) -> TreeOfDisks {
        let names: Vec<String> = (0..disks).map(|i| format!("D{i}")).collect();
        let pick = |rng: &mut ChaCha8Rng| {
            let terms = rng.gen_range(0..3);
            DiskCoord::new((0..terms).map(|i| (frac(1, 2 + i + 3 * rng.gen_range(0..2)), int(rng.gen_range(1..3))))).unwrap()
        };
        let mut attachments = Vec::new();
        for i in 1..disks {
            if rng.gen_bool(0.85) {
                let j = rng.gen_range(0..i);
                attachments.push(Attachment {
                    first: names[j].clone(),
                    at_first: pick(rng),
                    second: names[i].clone(),
                    at_second: pick(rng),
                });
            }
        }
        let marks = (0..marks)
            .map(|m| (format!("m{m}"), names[rng.gen_range(0..disks)].clone(), pick(rng)))
            .collect();
        TreeOfDisks::new(names, attachments, marks).unwrap()
    }

    #[test]
    fn bounded_search_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let t = random_tree(&mut rng, 4, 3);
            for k in 0..4 {
                for x in ["m0", "m1"] {
                    let b = ChainBudget::MaxMaps(k);
                    assert_eq!(dck_tree(&t, x, "m2", b).unwrap(), brute(&t, x, "m2", k, true));
                    assert_eq!(d_tree(&t, x, "m2", b).unwrap(), brute(&t, x, "m2", k, false));
                }
            }
            let big = ChainBudget::MaxMaps(20);
            let u = ChainBudget::Unbounded;
            assert_eq!(dck_tree(&t, "m0", "m1", big).unwrap(), dck_tree(&t, "m0", "m1", u).unwrap());
        }
    }

    #[test]
    fn semi_distance_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = ChainBudget::Unbounded;
        for _ in 0..30 {
            let t = random_tree(&mut rng, 6, 5);
            let marks: Vec<String> = t.marks().keys().cloned().collect();
            for a in &marks {
                for b in &marks {
                    assert!(d_tree(&t, a, b, u).unwrap() <= dck_tree(&t, a, b, u).unwrap());
                    for c in &marks {
                        let d = |p: &str, q: &str| d_tree(&t, p, q, u).unwrap();
                        assert!(d(a, c) <= d(a, b).max(d(b, c)));
                        let s = |p: &str, q: &str| dck_tree(&t, p, q, u).unwrap();
                        let total = match (s(a, b), s(b, c)) {
                            (Dist::Finite(p), Dist::Finite(q)) => Dist::Finite(p + q),
                            _ => Dist::Infinity,
                        };
                        assert!(s(a, c) <= total);
                    }
                }
            }
        }
    }

    fn circle() -> CurveModel {
        CurveModel::new(vec![Vertex::new("v", 0)], vec![Edge::new("v", "v", int(3))], vec![], vec![])
            .unwrap()
    }

    #[test]
    fn genus_examples() {
        assert_eq!(total_genus(&circle()).unwrap(), 1);
        let good = CurveModel::new(vec![Vertex::new("v", 2)], vec![], vec![], vec![]).unwrap();
        assert_eq!(total_genus(&good).unwrap(), 2);
        // theta graph (b = 2) with a genus-1 vertex
        let theta = CurveModel::new(
            vec![Vertex::new("a", 1), Vertex::new("b", 0)],
            vec![Edge::new("a", "b", int(1)), Edge::new("a", "b", int(2)), Edge::new("a", "b", int(3))],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(total_genus(&theta).unwrap(), 3);
        assert_eq!(nodes(&theta), vec!["a".to_string(), "b".to_string()]);
        let open = CurveModel::new(
            vec![Vertex::new("v", 0)],
            vec![],
            vec![SkeletonPoint::Vertex("v".into()); 3],
            vec![],
        )
        .unwrap();
        assert!(matches!(total_genus(&open), Err(Error::NotProjective)));
        assert_eq!(nodes(&open), vec!["v".to_string()]);
    }

    #[test]
    fn classification_cases() {
        let empty = CurveModel::new(vec![], vec![], vec![], vec![]).unwrap();
        assert_eq!(classify(&empty).unwrap(), Classification::ProjectiveLine);
        assert_eq!(classify(&circle()).unwrap(), Classification::TateCurve);
        assert!(nodes(&circle()).is_empty());
        let good = CurveModel::new(vec![Vertex::new("v", 2)], vec![], vec![], vec![]).unwrap();
        assert_eq!(classify(&good).unwrap(), Classification::GoodReduction(2));
        let loops = CurveModel::new(
            vec![Vertex::new("v", 1)],
            vec![Edge::new("v", "v", int(2))],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(classify(&loops).unwrap(), Classification::OneNodeWithLoops(2));
        let two = CurveModel::new(
            vec![Vertex::new("a", 1), Vertex::new("b", 1)],
            vec![Edge::new("a", "b", int(1))],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(classify(&two).unwrap(), Classification::MultiNode(2));
    }

    #[test]
    fn genus_zero_endpoint_is_rejected() {
        let bad = CurveModel::new(
            vec![Vertex::new("a", 1), Vertex::new("b", 0)],
            vec![Edge::new("a", "b", int(1))],
            vec![],
            vec![],
        );
        assert!(matches!(bad, Err(Error::InconsistentModel(_))));
        let lone = CurveModel::new(vec![Vertex::new("a", 0)], vec![], vec![], vec![]);
        assert!(matches!(lone, Err(Error::InconsistentModel(_))));
    }

    #[test]
    fn decomposition_examples() {
        let loops = CurveModel::new(
            vec![Vertex::new("v", 1), Vertex::new("w", 0)],
            vec![Edge::new("v", "w", int(2)), Edge::new("w", "v", int(3))],
            vec![],
            vec![],
        )
        .unwrap();
        let d = decompose(&loops).unwrap();
        assert_eq!(d.nodes, vec!["v".to_string()]);
        assert_eq!(d.segments, vec![SkeletonSegment { from: "v".into(), to: "v".into(), length: int(5), circle: true }]);
        let two = CurveModel::new(
            vec![Vertex::new("a", 1), Vertex::new("b", 1)],
            vec![Edge::new("a", "b", int(1)), Edge::new("a", "b", frac(1, 2))],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(decompose(&two).unwrap().segments.len(), 2);
        let good = CurveModel::new(vec![Vertex::new("v", 2)], vec![], vec![], vec![]).unwrap();
        assert!(decompose(&good).unwrap().segments.is_empty());
        assert!(matches!(decompose(&circle()), Err(Error::NoNodes)));
    }

    #[test]
    fn interior_puncture_becomes_node() {
        let m = CurveModel::new(
            vec![Vertex::new("v", 0)],
            vec![Edge::new("v", "v", int(4))],
            vec![SkeletonPoint::Edge { edge: 0, position: int(1) }],
            vec![],
        )
        .unwrap();
        assert_eq!(nodes(&m), vec!["e0@1".to_string()]);
    }

    #[test]
    fn retraction() {
        let q = SkeletonPoint::Edge { edge: 0, position: int(1) };
        let m = CurveModel::new(
            vec![Vertex::new("v", 0)],
            vec![Edge::new("v", "v", int(3))],
            vec![],
            vec![("A".into(), SkeletonPoint::Vertex("v".into())), ("B".into(), q.clone())],
        )
        .unwrap();
        let v = SkeletonPoint::Vertex("v".into());
        assert_eq!(retract(&m, &ModelPoint::Disk("A".into())).unwrap(), v);
        assert_eq!(retract(&m, &ModelPoint::Disk("B".into())).unwrap(), q);
        let once = retract(&m, &ModelPoint::Skeleton(q.clone())).unwrap();
        assert_eq!(retract(&m, &ModelPoint::Skeleton(once.clone())).unwrap(), once);
        let empty = CurveModel::new(vec![], vec![], vec![], vec![]).unwrap();
        assert!(matches!(retract(&empty, &ModelPoint::Skeleton(v)), Err(Error::EmptySkeleton)));
    }

    #[test]
    fn dck_on_curves() {
        let m = CurveModel::new(
            vec![Vertex::new("v", 1)],
            vec![],
            vec![],
            vec![("A".into(), SkeletonPoint::Vertex("v".into())), ("B".into(), SkeletonPoint::Vertex("v".into()))],
        )
        .unwrap();
        let p = |c: &str, x: DiskCoord| CurvePoint { component: c.into(), coordinate: x };
        let c = coord(frac(1, 3));
        assert_eq!(dck_curve(&m, &p("A", DiskCoord::zero()), &p("A", c.clone())).unwrap(), Dist::Finite(frac(1, 3)));
        assert_eq!(dck_curve(&m, &p("A", c.clone()), &p("A", c.clone())).unwrap(), Dist::Finite(int(0)));
        assert_eq!(dck_curve(&m, &p("A", c.clone()), &p("B", c.clone())).unwrap(), Dist::Infinity);
        let empty = CurveModel::new(vec![], vec![], vec![], vec![]).unwrap();
        assert!(matches!(dck_curve(&empty, &p("A", c.clone()), &p("A", c)), Err(Error::NotHyperbolic)));
    }

    #[test]
    fn star_shaped_validation() {
        let z = ValueGroup::integers();
        assert!(StarShapedData::new(1, vec![int(-1)], &z).is_ok());
        assert!(StarShapedData::new(0, vec![int(-1), int(-2), int(-1)], &z).is_ok());
        assert!(matches!(StarShapedData::new(0, vec![int(-1)], &z), Err(Error::InconsistentModel(_))));
        assert!(StarShapedData::new(1, vec![frac(-1, 2)], &z).is_err());
        assert!(StarShapedData::new(1, vec![int(0)], &z).is_err());
    }
}

//! Edge subdivision for noncrossing even-degree graphs: cut edges at
//! O(|E|) points so that the result admits a weakly simple Euler tour.
//!
//! All work happens per bar (maximal collinear overlap class), in
//! one-dimensional coordinates along the bar support. Three phases
//! partition each bar's (subdivided) edges:
//!
//! 1. matching paths `M+`/`M-` between points where other bars touch
//!    this one with odd incidence (plus this bar's own odd endpoints),
//! 2. two spanning paths `O+`/`O-` per connected component of the
//!    leftover edges, closed into a circuit,
//! 3. remaining components (`gamma` polygons) hooked onto `O+` at
//!    their leftmost vertex.
//!
//! A wiring pass then fixes the strand ends that must meet inside the
//! vertex neighborhoods, cutting extra station vertices where a strand
//! has no vertex at the meeting point. The companion embedding (see
//! [`crate::embedding`]) draws the partition at separated offsets
//! around each bar and realizes the wiring, which is what ultimately
//! certifies the subdivided graph.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::bars::{b_parity, bar_decomposition, Bar};
use crate::geom::{rat_int, Point, Rational, Segment};
use crate::graph::{build_graph, check_noncrossing, SegmentGraph, SegmentMultiset, VertexId};

/// Subdivision points per input edge instance (indices count the
/// expanded multiset, i.e. multiplicity unrolled in item order).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubdivisionPlan {
    pub cuts: BTreeMap<usize, Vec<Point>>,
}

impl SubdivisionPlan {
    pub fn total(&self) -> usize {
        self.cuts.values().map(Vec::len).sum()
    }

    /// Applies the plan to the multiset, splitting each instance at its
    /// recorded points.
    pub fn apply(&self, ms: &SegmentMultiset) -> SegmentMultiset {
        let mut items = Vec::new();
        for (idx, (_, seg)) in ms.expanded().enumerate() {
            let mut chain = vec![seg.a.clone()];
            if let Some(points) = self.cuts.get(&idx) {
                chain.extend(points.iter().cloned());
            }
            chain.push(seg.b.clone());
            for w in chain.windows(2) {
                items.push((Segment::new(w[0].clone(), w[1].clone()), 1));
            }
        }
        SegmentMultiset::new(ms.directed, items)
    }
}

/// Per-bar edge partition after the three phases, in world coordinates.
#[derive(Debug, Clone)]
pub struct BarPartition {
    pub support: Segment,
    pub m_plus: Vec<Vec<Segment>>,
    pub m_minus: Vec<Vec<Segment>>,
    pub o_plus: Vec<Vec<Segment>>,
    pub o_minus: Vec<Vec<Segment>>,
    pub gammas: Vec<Vec<Segment>>,
}

/// Errors from the subdivision pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarError {
    /// Input must be an undirected noncrossing multiset with all even
    /// degrees and a connected segment union.
    PreconditionViolated(&'static str),
    /// A subdivided path ran out of covering edges (internal invariant
    /// failure).
    NoCoveringEdge,
    /// A leftover component cannot supply two edge-disjoint spanning
    /// paths (internal parity failure).
    ComponentTooThin,
    /// No circuit edge covers a leftover component's leftmost vertex
    /// (internal invariant failure).
    NoContainingEdge,
    /// The embedding could not be drawn without a collision.
    EmbeddingOverlap(String),
    /// The embedded graph rejected the Euler-tour construction.
    TourFailed(String),
    /// The certificate builder failed on the embedded graph.
    CertificateFailed(String),
}

impl fmt::Display for StarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarError::PreconditionViolated(why) => write!(f, "precondition violated: {why}"),
            StarError::NoCoveringEdge => write!(f, "no covering edge for a subdivided path"),
            StarError::ComponentTooThin => write!(f, "component too thin for two spanning paths"),
            StarError::NoContainingEdge => write!(f, "no containing edge for a leftover component"),
            StarError::EmbeddingOverlap(what) => write!(f, "embedding overlap: {what}"),
            StarError::TourFailed(why) => write!(f, "tour construction failed: {why}"),
            StarError::CertificateFailed(why) => write!(f, "certificate failed: {why}"),
        }
    }
}

impl std::error::Error for StarError {}

/// Which feature set a bar piece ended up in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Assign {
    Free,
    MPlus(usize),
    MMinus(usize),
    OPlus(usize),
    OMinus(usize),
    Gamma(usize),
}

/// One (possibly subdivided) edge piece on a bar, as a parameter
/// interval along the support.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    /// Expanded instance index of the original input edge.
    pub origin: usize,
    pub assign: Assign,
}

/// Where a matching-list entry came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum EntrySrc {
    /// Interior point that is odd in the given other bar.
    Odd { other_bar: usize },
    /// This bar's own odd left endpoint.
    LeftRule,
    /// This bar's own odd right endpoint.
    RightRule,
    /// Appended right endpoint balancing an odd list.
    Padding,
}

#[derive(Debug, Clone)]
struct Entry {
    lam: Rational,
    src: EntrySrc,
    /// Representative world direction of the other bar at the point,
    /// used for angular tie ordering.
    dir: Option<(Rational, Rational)>,
}

/// A matching path built in phase 1.
#[derive(Debug, Clone)]
pub(crate) struct MPath {
    pub lo: Rational,
    pub hi: Rational,
    /// Piece indices in left-to-right order.
    pub pieces: Vec<usize>,
}

/// An `O+`/`O-` circuit component built in phase 2.
#[derive(Debug, Clone)]
pub(crate) struct OComp {
    pub r1: Rational,
    pub r2: Rational,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

/// A leftover polygon component from phase 3.
#[derive(Debug, Clone)]
pub(crate) struct GammaComp {
    pub left: Rational,
    pub pieces: Vec<usize>,
}

/// One end of a matching path: (bar, upper side, path index, left end).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct PortRef {
    pub bar: usize,
    pub plus: bool,
    pub path: usize,
    pub left_end: bool,
}

/// Wiring performed inside vertex neighborhoods by the embedding.
#[derive(Debug, Clone)]
pub(crate) enum Obligation {
    /// Double connection between the circuit station at `lam` and the
    /// overlapping matching path's vertex there (phase-2 rule).
    OCutToM {
        bar: usize,
        plus: bool,
        m_path: usize,
        lam: Rational,
    },
    /// The gamma polygon's closing detours through its `O+` station
    /// (phase-3 rule).
    GammaToStation {
        bar: usize,
        gamma: usize,
        lam: Rational,
    },
    /// Single connections closing `O+` and `O-` into one circuit at
    /// both component extremes.
    OClosing { bar: usize, comp: usize },
    /// A dangling matching-path end wired to a station on the named
    /// bar by a single connection (from an empty self-match).
    StationLink {
        bar: usize,
        plus: bool,
        lam: Rational,
        port: PortRef,
    },
    /// Two dangling matching-path ends at the same point wired to each
    /// other by a single connection.
    MEndPairing { a: PortRef, b: PortRef },
    /// A bar endpoint that is even in the other bar: double connection
    /// between stations for connectivity. `plus` is the side of the
    /// host bar the other bar extends into.
    EvenEndpointLink {
        bar: usize,
        other_bar: usize,
        lam: Rational,
        plus: bool,
    },
}

/// Raw self-match record emitted by phase 1, resolved by the wiring
/// pass into [`Obligation::StationLink`]s.
#[derive(Debug, Clone)]
struct SelfMatch {
    bar: usize,
    plus: bool,
    other1: usize,
    other2: usize,
    lam: Rational,
}

/// Working state of one bar through the phases.
#[derive(Debug, Clone)]
pub(crate) struct BarWork {
    pub origin_point: Point,
    pub dir: (Rational, Rational),
    pub len2: Rational,
    /// Graph vertices on the support, as (parameter, vertex id),
    /// ascending.
    pub verts: Vec<(Rational, VertexId)>,
    pub pieces: Vec<Piece>,
    pub m_plus: Vec<MPath>,
    pub m_minus: Vec<MPath>,
    pub o_comps: Vec<OComp>,
    pub gammas: Vec<GammaComp>,
    /// Recorded cuts: (expanded instance index, parameter on this bar).
    pub cuts: Vec<(usize, Rational)>,
}

impl BarWork {
    pub fn world(&self, lam: &Rational) -> Point {
        Point::new(
            &self.origin_point.x + &self.dir.0 * lam,
            &self.origin_point.y + &self.dir.1 * lam,
        )
    }

    pub fn segment_of(&self, piece: usize) -> Segment {
        Segment::new(
            self.world(&self.pieces[piece].lo),
            self.world(&self.pieces[piece].hi),
        )
    }

    /// Parameter of a point assumed to lie on the support line.
    pub fn param(&self, p: &Point) -> Rational {
        let rel = (&p.x - &self.origin_point.x, &p.y - &self.origin_point.y);
        (&rel.0 * &self.dir.0 + &rel.1 * &self.dir.1) / &self.len2
    }

    fn m_path(&self, plus: bool, idx: usize) -> &MPath {
        if plus {
            &self.m_plus[idx]
        } else {
            &self.m_minus[idx]
        }
    }

    /// Splits piece `idx` at `lam` (strictly inside), recording the cut
    /// and keeping the owning feature's piece sequence in order.
    /// Returns the index of the new right part.
    pub(crate) fn split(&mut self, idx: usize, lam: &Rational) -> usize {
        debug_assert!(self.pieces[idx].lo < *lam && *lam < self.pieces[idx].hi);
        let right = Piece {
            lo: lam.clone(),
            hi: self.pieces[idx].hi.clone(),
            origin: self.pieces[idx].origin,
            assign: self.pieces[idx].assign,
        };
        self.pieces[idx].hi = lam.clone();
        self.cuts.push((right.origin, lam.clone()));
        self.pieces.push(right);
        let new_idx = self.pieces.len() - 1;
        let seq: Option<&mut Vec<usize>> = match self.pieces[idx].assign {
            Assign::Free => None,
            Assign::MPlus(p) => Some(&mut self.m_plus[p].pieces),
            Assign::MMinus(p) => Some(&mut self.m_minus[p].pieces),
            Assign::OPlus(c) => Some(&mut self.o_comps[c].plus),
            Assign::OMinus(c) => Some(&mut self.o_comps[c].minus),
            Assign::Gamma(gi) => Some(&mut self.gammas[gi].pieces),
        };
        if let Some(seq) = seq {
            let pos = seq
                .iter()
                .position(|&x| x == idx)
                .expect("piece listed in its feature");
            seq.insert(pos + 1, new_idx);
        }
        new_idx
    }

    /// Builds a subdivided path from `p1` to `p2` over the free pieces:
    /// repeatedly take the free piece covering the front whose right
    /// endpoint is leftmost, cutting where needed.
    fn subdivided_path(&mut self, p1: &Rational, p2: &Rational) -> Result<Vec<usize>, StarError> {
        debug_assert!(p1 <= p2);
        let mut at = p1.clone();
        let mut out = Vec::new();
        while at < *p2 {
            let mut pick: Option<usize> = None;
            for i in 0..self.pieces.len() {
                let p = &self.pieces[i];
                if p.assign != Assign::Free || p.lo > at || at >= p.hi {
                    continue;
                }
                let better = match pick {
                    None => true,
                    Some(j) => {
                        let q = &self.pieces[j];
                        (&p.hi, &p.lo) < (&q.hi, &q.lo)
                    }
                };
                if better {
                    pick = Some(i);
                }
            }
            let Some(mut idx) = pick else {
                return Err(StarError::NoCoveringEdge);
            };
            if self.pieces[idx].lo < at {
                idx = self.split(idx, &at);
            }
            if *p2 < self.pieces[idx].hi {
                self.split(idx, p2);
            }
            at = self.pieces[idx].hi.clone();
            out.push(idx);
        }
        Ok(out)
    }

    /// Whether any piece of the given feature classes has a boundary
    /// vertex at `lam`.
    fn station_at(&self, lam: &Rational, classes: &[AssignClass]) -> bool {
        classes.iter().any(|class| {
            self.pieces
                .iter()
                .any(|p| class.matches(p.assign) && (p.lo == *lam || p.hi == *lam))
        })
    }

    /// Ensures some feature vertex exists at `lam`: if none does, cuts
    /// the first covering piece in priority order.
    fn ensure_station(&mut self, lam: &Rational, prefer_minus: bool) {
        let order: &[AssignClass] = if prefer_minus {
            &[
                AssignClass::OMinus,
                AssignClass::OPlus,
                AssignClass::MMinus,
                AssignClass::MPlus,
                AssignClass::Gamma,
            ]
        } else {
            &[
                AssignClass::OPlus,
                AssignClass::OMinus,
                AssignClass::MPlus,
                AssignClass::MMinus,
                AssignClass::Gamma,
            ]
        };
        if self.station_at(lam, order) {
            return;
        }
        for class in order {
            let covering = (0..self.pieces.len()).find(|&i| {
                class.matches(self.pieces[i].assign)
                    && self.pieces[i].lo < *lam
                    && *lam < self.pieces[i].hi
            });
            if let Some(idx) = covering {
                self.split(idx, lam);
                return;
            }
        }
        // The support is covered, so either a vertex already existed or
        // some class had a piece through lam.
        debug_assert!(
            self.pieces.iter().any(|p| p.lo == *lam || p.hi == *lam),
            "station resolution found no feature at the point"
        );
    }
}

/// Feature classes used for station priority searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AssignClass {
    OPlus,
    OMinus,
    MPlus,
    MMinus,
    Gamma,
}

impl AssignClass {
    pub(crate) fn matches(self, a: Assign) -> bool {
        matches!(
            (self, a),
            (AssignClass::OPlus, Assign::OPlus(_))
                | (AssignClass::OMinus, Assign::OMinus(_))
                | (AssignClass::MPlus, Assign::MPlus(_))
                | (AssignClass::MMinus, Assign::MMinus(_))
                | (AssignClass::Gamma, Assign::Gamma(_))
        )
    }
}

/// Joint result of the subdivision phases, consumed by the embedding.
#[derive(Debug, Clone)]
pub struct StarOutcome {
    /// The subdivided graph.
    pub gstar: SegmentGraph,
    /// The subdivided multiset (instances in plan order).
    pub star_multiset: SegmentMultiset,
    pub plan: SubdivisionPlan,
    pub partitions: Vec<BarPartition>,
    pub(crate) work: Vec<BarWork>,
    pub(crate) obligations: Vec<Obligation>,
}

fn cross(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// Ascending-angle comparison for two directions known to lie within
/// one closed half-plane (angular spread at most a half turn).
fn ascending_angle(u: &(Rational, Rational), w: &(Rational, Rational)) -> std::cmp::Ordering {
    let c = cross(u, w);
    if c.is_positive() {
        std::cmp::Ordering::Less
    } else if c.is_negative() {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Maps each group of `SegmentGraph::edges` back to expanded instance
/// indices of the multiset (file order).
pub(crate) fn instance_map(ms: &SegmentMultiset, g: &SegmentGraph) -> Vec<Vec<usize>> {
    let mut queues: BTreeMap<(Point, Point), Vec<usize>> = BTreeMap::new();
    for (idx, (_, seg)) in ms.expanded().enumerate() {
        let key = if seg.a <= seg.b {
            (seg.a.clone(), seg.b.clone())
        } else {
            (seg.b.clone(), seg.a.clone())
        };
        queues.entry(key).or_default().push(idx);
    }
    g.edges
        .iter()
        .map(|e| {
            let pa = g.point(e.u).clone();
            let pb = g.point(e.v).clone();
            let key = if pa <= pb { (pa, pb) } else { (pb, pa) };
            let q = queues.get_mut(&key).expect("edge came from the multiset");
            q.drain(..e.mult as usize).collect()
        })
        .collect()
}

/// Whether the union of all segments is a connected point set.
pub fn support_connected(g: &SegmentGraph) -> bool {
    let n = g.edges.len();
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let si = g.segment(&g.edges[i]);
            let sj = g.segment(&g.edges[j]);
            if crate::geom::classify_pair(&si, &sj) != crate::geom::PairClass::Disjoint {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let r0 = find(&mut parent, 0);
    (0..n).all(|i| find(&mut parent, i) == r0)
}

/// Runs the three subdivision phases plus the wiring pass and returns
/// the subdivided graph, the plan, and the per-bar partitions.
pub fn wspr_star(ms: &SegmentMultiset) -> Result<StarOutcome, StarError> {
    if ms.directed {
        return Err(StarError::PreconditionViolated("directed input"));
    }
    let g = build_graph(ms).map_err(|_| StarError::PreconditionViolated("degenerate segment"))?;
    if check_noncrossing(ms).is_err() {
        return Err(StarError::PreconditionViolated("crossing edges"));
    }
    if (0..g.vertices.len()).any(|v| g.degree(VertexId(v)) % 2 != 0) {
        return Err(StarError::PreconditionViolated("odd-degree vertex"));
    }
    if !support_connected(&g) {
        return Err(StarError::PreconditionViolated(
            "disconnected segment union",
        ));
    }
    let bars = bar_decomposition(&g);
    let inst = instance_map(ms, &g);

    let mut work: Vec<BarWork> = bars
        .iter()
        .map(|bar| {
            let a = bar.support.a.clone();
            let d = (&bar.support.b.x - &a.x, &bar.support.b.y - &a.y);
            let len2 = &d.0 * &d.0 + &d.1 * &d.1;
            let param = |p: &Point| -> Rational {
                ((&p.x - &a.x) * &d.0 + (&p.y - &a.y) * &d.1) / &len2
            };
            let verts: Vec<(Rational, VertexId)> = bar
                .on_vertices
                .iter()
                .map(|&v| (param(g.point(v)), v))
                .collect();
            let mut pieces = Vec::new();
            for &ei in &bar.member_edges {
                let e = &g.edges[ei];
                let mut lo = param(g.point(e.u));
                let mut hi = param(g.point(e.v));
                if lo > hi {
                    std::mem::swap(&mut lo, &mut hi);
                }
                for &origin in &inst[ei] {
                    pieces.push(Piece {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        origin,
                        assign: Assign::Free,
                    });
                }
            }
            BarWork {
                origin_point: a,
                dir: d,
                len2,
                verts,
                pieces,
                m_plus: Vec::new(),
                m_minus: Vec::new(),
                o_comps: Vec::new(),
                gammas: Vec::new(),
                cuts: Vec::new(),
            }
        })
        .collect();

    let mut obligations = Vec::new();
    let mut self_matches = Vec::new();
    for bi in 0..bars.len() {
        phase1(&g, &bars, &mut work, bi, &mut self_matches)?;
        debug_assert!(free_degrees_even(&work[bi]), "leftover parity broken");
        phase2(&mut work[bi], bi, &mut obligations)?;
        phase3(&mut work[bi], bi, &mut obligations)?;
    }
    resolve_wiring(&g, &bars, &mut work, self_matches, &mut obligations);
    assemble(ms, work, obligations)
}

/// Builds the outcome (plan, subdivided multiset and graph, partitions)
/// from finished per-bar work. Also the re-entry point when the
/// embedding pass forces an extra cut and the downstream data has to be
/// recomputed.
pub(crate) fn assemble(
    ms: &SegmentMultiset,
    work: Vec<BarWork>,
    obligations: Vec<Obligation>,
) -> Result<StarOutcome, StarError> {
    // Assemble the plan: cuts per instance, ordered along the edge.
    let mut plan = SubdivisionPlan::default();
    let instance_start: BTreeMap<usize, Point> = ms
        .expanded()
        .enumerate()
        .map(|(i, (_, s))| (i, s.a.clone()))
        .collect();
    for w in &work {
        for (origin, lam) in &w.cuts {
            plan.cuts.entry(*origin).or_default().push(w.world(lam));
        }
    }
    for (origin, pts) in plan.cuts.iter_mut() {
        let start = &instance_start[origin];
        pts.sort_by(|p, q| {
            crate::geom::squared_distance(start, p).cmp(&crate::geom::squared_distance(start, q))
        });
        pts.dedup();
    }

    let star_multiset = plan.apply(ms);
    let gstar = build_graph(&star_multiset)
        .map_err(|_| StarError::PreconditionViolated("degenerate subdivision"))?;
    debug_assert_eq!(
        star_multiset.expanded().count(),
        work.iter().map(|w| w.pieces.len()).sum::<usize>()
    );

    let partitions = work
        .iter()
        .map(|w| {
            let seg_of =
                |ids: &[usize]| -> Vec<Segment> { ids.iter().map(|&i| w.segment_of(i)).collect() };
            BarPartition {
                support: Segment::new(w.world(&Rational::zero()), w.world(&rat_int(1))),
                m_plus: w.m_plus.iter().map(|p| seg_of(&p.pieces)).collect(),
                m_minus: w.m_minus.iter().map(|p| seg_of(&p.pieces)).collect(),
                o_plus: w.o_comps.iter().map(|c| seg_of(&c.plus)).collect(),
                o_minus: w.o_comps.iter().map(|c| seg_of(&c.minus)).collect(),
                gammas: w.gammas.iter().map(|c| seg_of(&c.pieces)).collect(),
            }
        })
        .collect();

    Ok(StarOutcome {
        gstar,
        star_multiset,
        plan,
        partitions,
        work,
        obligations,
    })
}

/// Degree parity audit of the free (leftover) pieces of a bar.
fn free_degrees_even(w: &BarWork) -> bool {
    let mut deg: BTreeMap<Rational, usize> = BTreeMap::new();
    for p in &w.pieces {
        if p.assign == Assign::Free {
            *deg.entry(p.lo.clone()).or_default() += 1;
            *deg.entry(p.hi.clone()).or_default() += 1;
        }
    }
    deg.values().all(|d| d % 2 == 0)
}

fn phase1(
    g: &SegmentGraph,
    bars: &[Bar],
    work: &mut [BarWork],
    bi: usize,
    self_matches: &mut Vec<SelfMatch>,
) -> Result<(), StarError> {
    let d = work[bi].dir.clone();
    let zero = rat_int(0);
    let one = rat_int(1);
    let mut plus: Vec<Entry> = Vec::new();
    let mut minus: Vec<Entry> = Vec::new();
    let vert_list = work[bi].verts.clone();
    for (lam, v) in &vert_list {
        if *lam <= zero || *lam >= one {
            continue; // interior points only
        }
        for (oi, other) in bars.iter().enumerate() {
            if oi == bi || !other.on_vertices.contains(v) {
                continue;
            }
            if !b_parity(g, other, *v).unwrap_or(false) {
                continue;
            }
            // Side of the other bar: majority side of its edge ends at
            // the point (collinear counts as above). The total here is
            // odd, so the majority is well defined.
            let vp = g.point(*v);
            let mut above = 0usize;
            let mut below = 0usize;
            let mut dir_above: Option<(Rational, Rational)> = None;
            let mut dir_below: Option<(Rational, Rational)> = None;
            for &ei in &other.member_edges {
                let e = &g.edges[ei];
                let far = if e.u == *v {
                    Some(e.v)
                } else if e.v == *v {
                    Some(e.u)
                } else {
                    None
                };
                let Some(far) = far else { continue };
                let fp = g.point(far);
                let rel = (&fp.x - &vp.x, &fp.y - &vp.y);
                let side = cross(&d, &rel);
                for _ in 0..e.mult {
                    if side.is_negative() {
                        below += 1;
                        dir_below.get_or_insert_with(|| rel.clone());
                    } else {
                        above += 1;
                        dir_above.get_or_insert_with(|| rel.clone());
                    }
                }
            }
            if above > below {
                plus.push(Entry {
                    lam: lam.clone(),
                    src: EntrySrc::Odd { other_bar: oi },
                    dir: dir_above,
                });
            } else {
                minus.push(Entry {
                    lam: lam.clone(),
                    src: EntrySrc::Odd { other_bar: oi },
                    dir: dir_below.or(dir_above),
                });
            }
        }
    }
    // Sort by parameter; ties by angular order of the other bar
    // (clockwise from the bar direction in the upper list,
    // counterclockwise in the lower one).
    plus.sort_by(|a, b| {
        a.lam.cmp(&b.lam).then_with(|| match (&a.dir, &b.dir) {
            (Some(u), Some(w)) => ascending_angle(u, w).reverse(),
            _ => std::cmp::Ordering::Equal,
        })
    });
    minus.sort_by(|a, b| {
        a.lam.cmp(&b.lam).then_with(|| match (&a.dir, &b.dir) {
            (Some(u), Some(w)) => ascending_angle(u, w),
            _ => std::cmp::Ordering::Equal,
        })
    });
    // This bar's own odd endpoints join the upper list.
    let left_v = vert_list.first().expect("bar has vertices").1;
    let right_v = vert_list.last().expect("bar has vertices").1;
    if b_parity(g, &bars[bi], left_v).unwrap_or(false) {
        plus.insert(
            0,
            Entry {
                lam: zero.clone(),
                src: EntrySrc::LeftRule,
                dir: None,
            },
        );
    }
    if b_parity(g, &bars[bi], right_v).unwrap_or(false) {
        plus.push(Entry {
            lam: one.clone(),
            src: EntrySrc::RightRule,
            dir: None,
        });
    }
    if plus.len() % 2 == 1 {
        plus.push(Entry {
            lam: one.clone(),
            src: EntrySrc::Padding,
            dir: None,
        });
    }
    if minus.len() % 2 == 1 {
        minus.push(Entry {
            lam: one.clone(),
            src: EntrySrc::Padding,
            dir: None,
        });
    }
    for (is_plus, list) in [(true, plus), (false, minus)] {
        for pair in list.chunks(2) {
            let (e1, e2) = (&pair[0], &pair[1]);
            if e1.lam == e2.lam {
                // Empty path. Strand ends of two other bars meeting at
                // one point each wire to a local station; endpoint-rule
                // and padding self-matches need nothing.
                if let (EntrySrc::Odd { other_bar: o1 }, EntrySrc::Odd { other_bar: o2 }) =
                    (&e1.src, &e2.src)
                {
                    self_matches.push(SelfMatch {
                        bar: bi,
                        plus: is_plus,
                        other1: *o1,
                        other2: *o2,
                        lam: e1.lam.clone(),
                    });
                }
                continue;
            }
            let pieces = work[bi].subdivided_path(&e1.lam, &e2.lam)?;
            let path = MPath {
                lo: e1.lam.clone(),
                hi: e2.lam.clone(),
                pieces: pieces.clone(),
            };
            let assigned;
            if is_plus {
                assigned = Assign::MPlus(work[bi].m_plus.len());
                work[bi].m_plus.push(path);
            } else {
                assigned = Assign::MMinus(work[bi].m_minus.len());
                work[bi].m_minus.push(path);
            }
            for &pi in &pieces {
                work[bi].pieces[pi].assign = assigned;
            }
        }
    }
    Ok(())
}

fn phase2(w: &mut BarWork, bi: usize, obligations: &mut Vec<Obligation>) -> Result<(), StarError> {
    // Connected components of the free pieces (touching merges).
    let mut spans: Vec<(Rational, Rational)> = w
        .pieces
        .iter()
        .filter(|p| p.assign == Assign::Free)
        .map(|p| (p.lo.clone(), p.hi.clone()))
        .collect();
    spans.sort();
    let mut comps: Vec<(Rational, Rational)> = Vec::new();
    for (lo, hi) in spans {
        match comps.last_mut() {
            Some((_, chi)) if lo <= *chi => {
                if hi > *chi {
                    *chi = hi;
                }
            }
            _ => comps.push((lo, hi)),
        }
    }
    for (r1, r2) in comps {
        let comp_idx = w.o_comps.len();
        let plus = w.subdivided_path(&r1, &r2)?;
        for &pi in &plus {
            w.pieces[pi].assign = Assign::OPlus(comp_idx);
        }
        let minus = w
            .subdivided_path(&r1, &r2)
            .map_err(|_| StarError::ComponentTooThin)?;
        for &pi in &minus {
            w.pieces[pi].assign = Assign::OMinus(comp_idx);
        }
        w.o_comps.push(OComp {
            r1: r1.clone(),
            r2: r2.clone(),
            plus,
            minus,
        });
        obligations.push(Obligation::OClosing {
            bar: bi,
            comp: comp_idx,
        });

        // Every matching path overlapping this component shares one
        // vertex with the circuit on its own side.
        for is_plus in [true, false] {
            let n_paths = if is_plus {
                w.m_plus.len()
            } else {
                w.m_minus.len()
            };
            for mp in 0..n_paths {
                let (plo, phi) = {
                    let path = w.m_path(is_plus, mp);
                    (path.lo.clone(), path.hi.clone())
                };
                let olo = if plo > r1 { plo.clone() } else { r1.clone() };
                let ohi = if phi < r2 { phi.clone() } else { r2.clone() };
                if olo >= ohi {
                    continue; // no positive-length overlap
                }
                // Leftmost path vertex strictly inside the component,
                // else any inside the closed interval, else give the
                // path a vertex at the left extreme.
                let mut vs: Vec<Rational> = Vec::new();
                for &pi in &w.m_path(is_plus, mp).pieces {
                    vs.push(w.pieces[pi].lo.clone());
                    vs.push(w.pieces[pi].hi.clone());
                }
                vs.sort();
                vs.dedup();
                let lam = vs
                    .iter()
                    .find(|l| **l > r1 && **l < r2)
                    .or_else(|| vs.iter().find(|l| **l >= r1 && **l <= r2))
                    .cloned();
                let lam = match lam {
                    Some(l) => l,
                    None => {
                        let pidx = w
                            .m_path(is_plus, mp)
                            .pieces
                            .iter()
                            .copied()
                            .find(|&pi| w.pieces[pi].lo < r1 && r1 < w.pieces[pi].hi);
                        if let Some(pidx) = pidx {
                            w.split(pidx, &r1);
                        }
                        r1.clone()
                    }
                };
                ensure_o_vertex(w, comp_idx, is_plus, &lam);
                obligations.push(Obligation::OCutToM {
                    bar: bi,
                    plus: is_plus,
                    m_path: mp,
                    lam,
                });
            }
        }
    }
    Ok(())
}

/// Ensures the component's `O+` (or `O-`) path has a vertex at `lam`,
/// cutting the covering piece when necessary.
fn ensure_o_vertex(w: &mut BarWork, comp: usize, plus: bool, lam: &Rational) {
    let list: Vec<usize> = if plus {
        w.o_comps[comp].plus.clone()
    } else {
        w.o_comps[comp].minus.clone()
    };
    for &pi in &list {
        if w.pieces[pi].lo == *lam || w.pieces[pi].hi == *lam {
            return;
        }
    }
    for &pi in &list {
        if w.pieces[pi].lo < *lam && *lam < w.pieces[pi].hi {
            w.split(pi, lam);
            return;
        }
    }
}

fn phase3(w: &mut BarWork, bi: usize, obligations: &mut Vec<Obligation>) -> Result<(), StarError> {
    // Components of the remaining free pieces, by shared endpoints.
    let free: Vec<usize> = (0..w.pieces.len())
        .filter(|&i| w.pieces[i].assign == Assign::Free)
        .collect();
    if free.is_empty() {
        return Ok(());
    }
    let mut parent: Vec<usize> = (0..free.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..free.len() {
        for j in i + 1..free.len() {
            let (a, b) = (&w.pieces[free[i]], &w.pieces[free[j]]);
            if a.lo == b.lo || a.lo == b.hi || a.hi == b.lo || a.hi == b.hi {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &pi) in free.iter().enumerate() {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(pi);
    }
    let mut groups: Vec<(Rational, Vec<usize>)> = by_root
        .into_values()
        .map(|pieces| {
            let left = pieces
                .iter()
                .map(|&pi| w.pieces[pi].lo.clone())
                .min()
                .expect("component nonempty");
            (left, pieces)
        })
        .collect();
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    for (left, pieces) in groups {
        // Station on O+ at the leftmost vertex.
        let comp = (0..w.o_comps.len())
            .find(|&c| w.o_comps[c].r1 <= left && left <= w.o_comps[c].r2)
            .ok_or(StarError::NoContainingEdge)?;
        ensure_o_vertex(w, comp, true, &left);
        let gamma_idx = w.gammas.len();
        for &pi in &pieces {
            w.pieces[pi].assign = Assign::Gamma(gamma_idx);
        }
        w.gammas.push(GammaComp {
            left: left.clone(),
            pieces,
        });
        obligations.push(Obligation::GammaToStation {
            bar: bi,
            gamma: gamma_idx,
            lam: left,
        });
    }
    Ok(())
}

/// Resolves self-matches into station links, pairs the remaining
/// dangling matching-path ends point by point, adds connectivity
/// hookups at even bar endpoints, and makes sure every needed station
/// vertex exists (cutting where it does not).
fn resolve_wiring(
    g: &SegmentGraph,
    bars: &[Bar],
    work: &mut [BarWork],
    self_matches: Vec<SelfMatch>,
    obligations: &mut Vec<Obligation>,
) {
    // Ledger of matching-path end ports by world point.
    let mut ports: BTreeMap<Point, Vec<PortRef>> = BTreeMap::new();
    for (bi, w) in work.iter().enumerate() {
        for (plus, paths) in [(true, &w.m_plus), (false, &w.m_minus)] {
            for (pi, path) in paths.iter().enumerate() {
                for (left_end, lam) in [(true, &path.lo), (false, &path.hi)] {
                    ports.entry(w.world(lam)).or_default().push(PortRef {
                        bar: bi,
                        plus,
                        path: pi,
                        left_end,
                    });
                }
            }
        }
    }
    for list in ports.values_mut() {
        list.sort();
    }
    // Self-matches consume one port of each named bar at the point and
    // wire it to a station on the host bar. The ports are taken both or
    // neither: consuming only one would leave the station with a single
    // (odd) hookup. When a port is missing the pair falls through to the
    // plain end pairing below and the ensured station stays a harmless
    // pass-through vertex.
    for sm in self_matches {
        let p = work[sm.bar].world(&sm.lam);
        work[sm.bar].ensure_station(&sm.lam, !sm.plus);
        let Some(list) = ports.get_mut(&p) else {
            continue;
        };
        let Some(pos1) = list.iter().position(|pt| pt.bar == sm.other1) else {
            continue;
        };
        let port1 = list.remove(pos1);
        let Some(pos2) = list.iter().position(|pt| pt.bar == sm.other2) else {
            list.insert(pos1, port1);
            continue;
        };
        let port2 = list.remove(pos2);
        for port in [port1, port2] {
            obligations.push(Obligation::StationLink {
                bar: sm.bar,
                plus: sm.plus,
                lam: sm.lam.clone(),
                port,
            });
        }
    }
    // Remaining ports pair up within each point.
    for (point, list) in ports {
        debug_assert!(list.len() % 2 == 0, "odd dangling ports at {point:?}");
        for pair in list.chunks(2) {
            if pair.len() == 2 {
                obligations.push(Obligation::MEndPairing {
                    a: pair[0],
                    b: pair[1],
                });
            }
        }
    }
    // Connectivity hookups where a bar endpoint rests on another bar
    // with even incidence (no matching entry exists for it).
    let mut links: Vec<(usize, usize, Rational)> = Vec::new();
    for (bi, bar) in bars.iter().enumerate() {
        for (oi, other) in bars.iter().enumerate() {
            if oi == bi {
                continue;
            }
            for endpoint in [&other.support.a, &other.support.b] {
                let Some((lam, v)) = work[bi]
                    .verts
                    .iter()
                    .find(|(_, vid)| g.point(*vid) == endpoint)
                    .cloned()
                else {
                    continue;
                };
                if b_parity(g, other, v).unwrap_or(true) {
                    continue;
                }
                let both_endpoints = endpoint == &bar.support.a || endpoint == &bar.support.b;
                if both_endpoints && bi > oi {
                    continue; // counted once, from the smaller index
                }
                if !links
                    .iter()
                    .any(|(b, o, l)| *b == bi && *o == oi && *l == lam)
                {
                    links.push((bi, oi, lam));
                }
            }
        }
    }
    for (bi, oi, lam) in links {
        // Side of the host bar the other bar extends into; the station is
        // preferred on that side so the hookup does not have to cross the
        // host's own strands. The two supports share only the endpoint,
        // so the cross product cannot vanish.
        let p = work[bi].world(&lam);
        let from_endpoint = if work[oi].world(&Rational::zero()) == p {
            work[oi].dir.clone()
        } else {
            (-&work[oi].dir.0, -&work[oi].dir.1)
        };
        let plus = cross(&work[bi].dir, &from_endpoint).is_positive();
        work[bi].ensure_station(&lam, !plus);
        // The other bar always has a piece boundary at its own support
        // endpoint; nothing to cut there.
        debug_assert!({
            let other_lam = work[oi]
                .verts
                .iter()
                .find(|(_, vid)| g.point(*vid) == &p)
                .map(|(l, _)| l.clone())
                .expect("endpoint is a vertex of its own bar");
            work[oi]
                .pieces
                .iter()
                .any(|pc| pc.lo == other_lam || pc.hi == other_lam)
        });
        obligations.push(Obligation::EvenEndpointLink {
            bar: bi,
            other_bar: oi,
            lam,
            plus,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_eulerian;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
        Segment::new(pt(x1, y1), pt(x2, y2))
    }

    fn ms(items: Vec<(Segment, u32)>) -> SegmentMultiset {
        SegmentMultiset::new(false, items)
    }

    #[test]
    fn square_needs_no_cuts() {
        let input = ms(vec![
            (seg(0, 0, 4, 0), 1),
            (seg(4, 0, 4, 4), 1),
            (seg(4, 4, 0, 4), 1),
            (seg(0, 4, 0, 0), 1),
        ]);
        let out = wspr_star(&input).expect("valid input");
        assert_eq!(out.plan.total(), 0);
        assert_eq!(out.gstar.edge_count(), 4);
        // Every bar becomes a single matching path spanning it, and the
        // four corners pair the dangling ends.
        for p in &out.partitions {
            assert_eq!(p.m_plus.len(), 1);
            assert!(p.o_plus.is_empty());
            assert!(p.gammas.is_empty());
        }
        let pairings = out
            .obligations
            .iter()
            .filter(|o| matches!(o, Obligation::MEndPairing { .. }))
            .count();
        assert_eq!(pairings, 4);
    }

    #[test]
    fn doubled_edge_becomes_circuit() {
        let input = ms(vec![(seg(0, 0, 4, 0), 2)]);
        let out = wspr_star(&input).expect("valid input");
        assert_eq!(out.plan.total(), 0);
        let p = &out.partitions[0];
        assert!(p.m_plus.is_empty());
        assert_eq!(p.o_plus.len(), 1);
        assert_eq!(p.o_minus.len(), 1);
    }

    #[test]
    fn four_parallel_copies_split_between_o_and_gamma() {
        let input = ms(vec![(seg(0, 0, 4, 0), 4)]);
        let out = wspr_star(&input).expect("valid input");
        let p = &out.partitions[0];
        assert_eq!(p.o_plus.len(), 1);
        assert_eq!(p.o_minus.len(), 1);
        assert_eq!(p.gammas.len(), 1);
        assert_eq!(p.gammas[0].len(), 2);
    }

    #[test]
    fn overlap_cut_for_gamma_station() {
        // One long edge doubled, overlapped by a doubled short one: the
        // leftovers form a gamma polygon whose station cuts the O+ copy.
        let input = ms(vec![(seg(0, 0, 4, 0), 2), (seg(1, 0, 3, 0), 2)]);
        let out = wspr_star(&input).expect("valid input");
        let p = &out.partitions[0];
        assert_eq!(p.o_plus.len(), 1);
        assert_eq!(p.gammas.len(), 1);
        assert_eq!(out.plan.total(), 1);
        assert!(check_eulerian(&out.gstar));
    }

    #[test]
    fn t_junction_station_reconnects_the_graph() {
        // A doubled baseline with a doubled stub standing on its
        // interior: the stub is even there, so connectivity comes from
        // an endpoint hookup whose station splits one baseline copy.
        let input = ms(vec![(seg(0, 0, 4, 0), 2), (seg(2, 0, 2, 3), 2)]);
        let out = wspr_star(&input).expect("valid input");
        assert!(out
            .obligations
            .iter()
            .any(|o| matches!(o, Obligation::EvenEndpointLink { .. })));
        assert_eq!(out.plan.total(), 1);
        assert!(check_eulerian(&out.gstar));
    }

    #[test]
    fn odd_stubs_force_matching_paths() {
        // Single stubs up and down at x = 1 and x = 3 over a doubled
        // baseline, capped by horizontal returns so all degrees are
        // even. Both baseline copies get cut at the stub feet.
        let input = ms(vec![
            (seg(0, 0, 4, 0), 2),
            (seg(1, 0, 1, 2), 1),
            (seg(3, 0, 3, 2), 1),
            (seg(1, 2, 3, 2), 1),
            (seg(1, 0, 1, -2), 1),
            (seg(3, 0, 3, -2), 1),
            (seg(1, -2, 3, -2), 1),
        ]);
        let out = wspr_star(&input).expect("valid input");
        let p0 = out
            .partitions
            .iter()
            .find(|p| p.support == seg(0, 0, 4, 0))
            .expect("baseline bar");
        assert_eq!(p0.m_plus.len(), 1);
        assert_eq!(p0.m_minus.len(), 1);
        assert_eq!(p0.m_plus[0], vec![seg(1, 0, 3, 0)]);
        assert_eq!(out.plan.total(), 4);
        assert!(check_eulerian(&out.gstar));
    }

    #[test]
    fn triangle_pair_stations_cut_the_red_edge() {
        // Miniature adversarial instance: a red edge [0,2] under a unit
        // path, with a triangle pair above and below the interior
        // vertex. The below pair's station must cut the red edge.
        let input = ms(vec![
            (seg(0, 0, 2, 0), 1), // red
            (seg(0, 0, 1, 0), 1),
            (seg(1, 0, 2, 0), 1),
            (seg(1, 0, 6, 8), 1),
            (seg(6, 8, 7, 8), 1),
            (seg(7, 8, 1, 0), 1),
            (seg(1, 0, 6, -8), 1),
            (seg(6, -8, 7, -8), 1),
            (seg(7, -8, 1, 0), 1),
        ]);
        let out = wspr_star(&input).expect("valid input");
        let stations = out
            .obligations
            .iter()
            .filter(|o| matches!(o, Obligation::StationLink { .. }))
            .count();
        assert_eq!(stations, 4);
        // Exactly one cut: the red edge at (1,0) for the lower station.
        assert_eq!(out.plan.total(), 1);
        assert_eq!(out.plan.cuts.get(&0), Some(&vec![pt(1, 0)]));
        assert!(check_eulerian(&out.gstar));
    }

    #[test]
    fn rejects_bad_inputs() {
        let odd = ms(vec![(seg(0, 0, 1, 0), 1)]);
        assert!(matches!(
            wspr_star(&odd),
            Err(StarError::PreconditionViolated(_))
        ));
        let crossing = ms(vec![(seg(0, 0, 2, 2), 2), (seg(0, 2, 2, 0), 2)]);
        assert!(matches!(
            wspr_star(&crossing),
            Err(StarError::PreconditionViolated(_))
        ));
        let disconnected = ms(vec![(seg(0, 0, 1, 0), 2), (seg(5, 5, 6, 5), 2)]);
        assert!(matches!(
            wspr_star(&disconnected),
            Err(StarError::PreconditionViolated(_))
        ));
        let directed = SegmentMultiset::new(true, vec![(seg(0, 0, 1, 0), 2)]);
        assert!(matches!(
            wspr_star(&directed),
            Err(StarError::PreconditionViolated(_))
        ));
    }
}

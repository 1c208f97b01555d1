//! Edge insertion: augment a connected noncrossing multigraph with new
//! edges so the result admits a weakly simple Euler tour, keeping the
//! inserted length within three times the input length.
//!
//! The construction works bar by bar. With `u_0 .. u_k` the vertices
//! along a bar's support, every elementary interval `u_{i-1} u_i`
//! covered an odd number of times receives one *parity* copy; the old
//! and parity edges of the bar then form an even-degree local graph
//! whose components become stacked polygons inside the bar's corridor.
//! Every interval additionally receives two more copies, which are
//! drawn as the upper and lower arcs of a circuit hugging the corridor
//! boundary. Hooking each stacked polygon to the upper arc, and arcs of
//! bars that meet at a vertex to each other, yields a connected
//! even-degree drawing whose tour collapses onto the augmented graph.
//!
//! Unlike subdivision, insertion never splits an input edge: the tour
//! traverses every original edge whole, and drawn detours around
//! interior vertices survive only as bend points of the certificate.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::bars::{bar_decomposition, Bar};
use crate::certify::PerturbationCertificate;
use crate::embedding::{draw_and_certify, EmbedFail};
use crate::geom::{rat_int, Point, Rational, Segment};
use crate::graph::{
    build_graph, check_eulerian, check_noncrossing, SegmentGraph, SegmentMultiset, Tour, VertexId,
};
use crate::star::{
    assemble, instance_map, support_connected, Assign, BarWork, GammaComp, OComp, Obligation,
    Piece, StarOutcome,
};

/// Errors from the insertion pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlusError {
    /// The input violates a structural precondition.
    PreconditionViolated(&'static str),
    /// The union of the segments is not a connected point set, so no
    /// bounded insertion can make the graph tour-connected.
    DisconnectedUnion,
    /// The layout could not be drawn or certified.
    EmbeddingFailed(String),
}

impl fmt::Display for PlusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlusError::PreconditionViolated(why) => write!(f, "precondition violated: {why}"),
            PlusError::DisconnectedUnion => write!(f, "segment union is disconnected"),
            PlusError::EmbeddingFailed(why) => write!(f, "insertion embedding failed: {why}"),
        }
    }
}

impl std::error::Error for PlusError {}

/// Vertices along the bar's support as ascending (parameter, id) pairs,
/// with the parameter normalized so the support runs from 0 to 1.
fn bar_axis(g: &SegmentGraph, bar: &Bar) -> Vec<(Rational, VertexId)> {
    let a = &bar.support.a;
    let d = (&bar.support.b.x - &a.x, &bar.support.b.y - &a.y);
    let len2 = &d.0 * &d.0 + &d.1 * &d.1;
    let mut verts: Vec<(Rational, VertexId)> = bar
        .on_vertices
        .iter()
        .map(|&v| {
            let p = g.point(v);
            let lam = ((&p.x - &a.x) * &d.0 + (&p.y - &a.y) * &d.1) / &len2;
            (lam, v)
        })
        .collect();
    verts.sort_by(|x, y| x.0.cmp(&y.0));
    verts
}

/// Coverage count (with multiplicity) of each elementary interval
/// between consecutive support vertices.
fn interval_coverage(g: &SegmentGraph, bar: &Bar, verts: &[(Rational, VertexId)]) -> Vec<u64> {
    let mut cov = vec![0u64; verts.len().saturating_sub(1)];
    for &ei in &bar.member_edges {
        let e = &g.edges[ei];
        let pa = g.point(e.u);
        let pb = g.point(e.v);
        let (mut lo, mut hi) = (param_of(bar, pa), param_of(bar, pb));
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        for (i, c) in cov.iter_mut().enumerate() {
            if lo <= verts[i].0 && verts[i + 1].0 <= hi {
                *c += e.mult as u64;
            }
        }
    }
    cov
}

fn param_of(bar: &Bar, p: &Point) -> Rational {
    let a = &bar.support.a;
    let d = (&bar.support.b.x - &a.x, &bar.support.b.y - &a.y);
    let len2 = &d.0 * &d.0 + &d.1 * &d.1;
    ((&p.x - &a.x) * &d.0 + (&p.y - &a.y) * &d.1) / len2
}

fn world_of(bar: &Bar, lam: &Rational) -> Point {
    let a = &bar.support.a;
    let d = (&bar.support.b.x - &a.x, &bar.support.b.y - &a.y);
    Point::new(&a.x + &d.0 * lam, &a.y + &d.1 * lam)
}

/// One new edge per elementary interval of the bar that the existing
/// edges cover an odd number of times.
pub fn parity_cover(g: &SegmentGraph, bar: &Bar) -> Vec<Segment> {
    let verts = bar_axis(g, bar);
    let cov = interval_coverage(g, bar, &verts);
    cov.iter()
        .enumerate()
        .filter(|(_, c)| *c % 2 == 1)
        .map(|(i, _)| Segment::new(world_of(bar, &verts[i].0), world_of(bar, &verts[i + 1].0)))
        .collect()
}

/// Two new copies of every elementary interval of the bar.
pub fn doubling(g: &SegmentGraph, bar: &Bar) -> Vec<(Segment, u32)> {
    let verts = bar_axis(g, bar);
    verts
        .windows(2)
        .map(|w| {
            (
                Segment::new(world_of(bar, &w[0].0), world_of(bar, &w[1].0)),
                2,
            )
        })
        .collect()
}

/// The augmentation together with the layout the embedding consumes.
#[derive(Debug, Clone)]
pub struct PlusOutcome {
    /// Inserted edges: per bar, the parity copies followed by the
    /// doubled intervals.
    pub added: Vec<(Segment, u32)>,
    /// The input items followed by `added`.
    pub augmented: SegmentMultiset,
    pub(crate) layout: StarOutcome,
}

impl PlusOutcome {
    /// The augmented graph.
    pub fn gplus(&self) -> &SegmentGraph {
        &self.layout.gstar
    }
}

/// Which feature a piece of the augmented multiset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    /// Old or parity edge: body of a stacked polygon.
    Body,
    /// First doubled copy: upper arc.
    ArcPlus,
    /// Second doubled copy: lower arc.
    ArcMinus,
}

/// Computes the inserted edges and builds the augmented graph along
/// with the drawing layout.
///
/// The inserted length never exceeds three times the input length: per
/// bar, the parity copies cover at most the support once, the doubling
/// covers it exactly twice, and the old edges cover it at least once;
/// the comparison is exact on the rational support parameters.
pub fn wspr_plus(ms: &SegmentMultiset) -> Result<PlusOutcome, PlusError> {
    if ms.directed {
        return Err(PlusError::PreconditionViolated("directed input"));
    }
    let g = build_graph(ms).map_err(|_| PlusError::PreconditionViolated("degenerate segment"))?;
    if check_noncrossing(ms).is_err() {
        return Err(PlusError::PreconditionViolated("crossing edges"));
    }
    if !support_connected(&g) {
        return Err(PlusError::DisconnectedUnion);
    }
    let bars = bar_decomposition(&g);

    let mut added: Vec<(Segment, u32)> = Vec::new();
    let mut added_roles: Vec<Role> = Vec::new();
    for bar in &bars {
        let verts = bar_axis(&g, bar);
        let cov = interval_coverage(&g, bar, &verts);

        // The bar-local graph of old and parity edges has even degrees:
        // at each vertex, the coverage parities of the two flanking
        // intervals differ exactly when an odd number of edges end
        // there.
        for (i, (_, v)) in verts.iter().enumerate() {
            let left_odd = i > 0 && cov[i - 1] % 2 == 1;
            let right_odd = i < cov.len() && cov[i] % 2 == 1;
            let ends: u64 = bar
                .member_edges
                .iter()
                .map(|&ei| {
                    let e = &g.edges[ei];
                    if e.u == *v || e.v == *v {
                        e.mult as u64
                    } else {
                        0
                    }
                })
                .sum();
            assert_eq!(
                (ends + left_odd as u64 + right_odd as u64) % 2,
                0,
                "bar-local degrees must be even after the parity cover"
            );
        }

        // Exact length bound in support parameters: parity + doubling
        // is at most support + 2 * support, and the old edges cover the
        // support at least once.
        let support_len: Rational = verts.last().expect("bar has vertices").0.clone();
        let parity_len: Rational = cov
            .iter()
            .enumerate()
            .filter(|(_, c)| *c % 2 == 1)
            .map(|(i, _)| &verts[i + 1].0 - &verts[i].0)
            .sum();
        let edges_len: Rational = bar
            .member_edges
            .iter()
            .map(|&ei| {
                let e = &g.edges[ei];
                let diff = &param_of(bar, g.point(e.u)) - &param_of(bar, g.point(e.v));
                diff.abs() * rat_int(e.mult as i64)
            })
            .sum();
        let inserted = &parity_len + &support_len * rat_int(2);
        assert!(
            inserted <= edges_len * rat_int(3),
            "inserted length exceeds three times the bar's edge length"
        );

        for seg in parity_cover(&g, bar) {
            added.push((seg, 1));
            added_roles.push(Role::Body);
        }
        for item in doubling(&g, bar) {
            added.push(item);
            added_roles.push(Role::ArcPlus);
            added_roles.push(Role::ArcMinus);
        }
    }

    let mut items = ms.items.clone();
    items.extend(added.iter().cloned());
    let augmented = SegmentMultiset::new(false, items);
    let layout = build_layout(ms, &augmented, &added_roles)?;
    Ok(PlusOutcome {
        added,
        augmented,
        layout,
    })
}

fn cross_rr(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// Assembles the per-bar features of the augmented graph: one spanning
/// arc pair per bar from the doubled copies, the old and parity edges
/// as stacked polygon components, and the vertex-neighborhood wiring.
fn build_layout(
    ms: &SegmentMultiset,
    augmented: &SegmentMultiset,
    added_roles: &[Role],
) -> Result<StarOutcome, PlusError> {
    let role_of = |origin: usize| -> Role {
        if origin < ms.size() {
            Role::Body
        } else {
            added_roles[origin - ms.size()]
        }
    };
    let gplus =
        build_graph(augmented).map_err(|_| PlusError::PreconditionViolated("degenerate segment"))?;
    assert!(
        check_eulerian(&gplus),
        "augmented graph must be connected with even degrees"
    );
    let bars = bar_decomposition(&gplus);
    let inst = instance_map(augmented, &gplus);

    let mut work: Vec<BarWork> = Vec::with_capacity(bars.len());
    let mut obligations: Vec<Obligation> = Vec::new();
    for (bi, bar) in bars.iter().enumerate() {
        let a = bar.support.a.clone();
        let d = (&bar.support.b.x - &a.x, &bar.support.b.y - &a.y);
        let len2 = &d.0 * &d.0 + &d.1 * &d.1;
        let param = |p: &Point| -> Rational {
            ((&p.x - &a.x) * &d.0 + (&p.y - &a.y) * &d.1) / &len2
        };
        let mut verts: Vec<(Rational, VertexId)> = bar
            .on_vertices
            .iter()
            .map(|&v| (param(gplus.point(v)), v))
            .collect();
        verts.sort_by(|x, y| x.0.cmp(&y.0));

        let mut pieces: Vec<Piece> = Vec::new();
        let mut arc_plus: Vec<usize> = Vec::new();
        let mut arc_minus: Vec<usize> = Vec::new();
        let mut bodies: Vec<usize> = Vec::new();
        for &ei in &bar.member_edges {
            let e = &gplus.edges[ei];
            let mut lo = param(gplus.point(e.u));
            let mut hi = param(gplus.point(e.v));
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            for &origin in &inst[ei] {
                let idx = pieces.len();
                match role_of(origin) {
                    Role::Body => bodies.push(idx),
                    Role::ArcPlus => arc_plus.push(idx),
                    Role::ArcMinus => arc_minus.push(idx),
                }
                pieces.push(Piece {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    origin,
                    assign: Assign::Free,
                });
            }
        }
        arc_plus.sort_by(|&x, &y| pieces[x].lo.cmp(&pieces[y].lo));
        arc_minus.sort_by(|&x, &y| pieces[x].lo.cmp(&pieces[y].lo));
        for &pi in &arc_plus {
            pieces[pi].assign = Assign::OPlus(0);
        }
        for &pi in &arc_minus {
            pieces[pi].assign = Assign::OMinus(0);
        }
        debug_assert!(
            !arc_plus.is_empty()
                && pieces[arc_plus[0]].lo.is_zero()
                && pieces[*arc_plus.last().expect("arc present")].hi.is_one(),
            "doubled copies must span the whole support"
        );

        // Group the bodies into connected components over shared
        // endpoint parameters; each becomes one stacked polygon, hooked
        // to the upper arc at its leftmost vertex. Components are
        // ordered by that vertex, ties by smallest vertex id, matching
        // the stacking order of the drawing.
        let mut parent: BTreeMap<Rational, Rational> = BTreeMap::new();
        for &pi in &bodies {
            let (lo, hi) = (pieces[pi].lo.clone(), pieces[pi].hi.clone());
            parent.entry(lo.clone()).or_insert_with(|| lo.clone());
            parent.entry(hi.clone()).or_insert_with(|| hi.clone());
            union(&mut parent, &lo, &hi);
        }
        let mut comps: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
        for &pi in &bodies {
            let root = find(&mut parent, &pieces[pi].lo);
            comps.entry(root).or_default().push(pi);
        }
        let vid_at: BTreeMap<&Rational, VertexId> =
            verts.iter().map(|(lam, v)| (lam, *v)).collect();
        let mut comp_list: Vec<(Rational, VertexId, Vec<usize>)> = comps
            .into_values()
            .map(|members| {
                let left = members
                    .iter()
                    .map(|&pi| pieces[pi].lo.clone())
                    .min()
                    .expect("component has members");
                let smallest = members
                    .iter()
                    .flat_map(|&pi| [&pieces[pi].lo, &pieces[pi].hi])
                    .filter_map(|lam| vid_at.get(lam))
                    .min()
                    .copied()
                    .expect("component endpoints are vertices");
                (left, smallest, members)
            })
            .collect();
        comp_list.sort_by(|x, y| (&x.0, x.1).cmp(&(&y.0, y.1)));
        let gammas: Vec<GammaComp> = comp_list
            .iter()
            .enumerate()
            .map(|(gi, (left, _, members))| {
                for &pi in members {
                    pieces[pi].assign = Assign::Gamma(gi);
                }
                GammaComp {
                    left: left.clone(),
                    pieces: members.clone(),
                }
            })
            .collect();

        for (gi, comp) in gammas.iter().enumerate() {
            obligations.push(Obligation::GammaToStation {
                bar: bi,
                gamma: gi,
                lam: comp.left.clone(),
            });
        }
        obligations.push(Obligation::OClosing { bar: bi, comp: 0 });

        work.push(BarWork {
            origin_point: a,
            dir: d,
            len2,
            verts,
            pieces,
            m_plus: Vec::new(),
            m_minus: Vec::new(),
            o_comps: vec![OComp {
                r1: Rational::zero(),
                r2: Rational::one(),
                plus: arc_plus,
                minus: arc_minus,
            }],
            gammas,
            cuts: Vec::new(),
        });
    }

    // Arcs of bars meeting at a vertex are wired together there. At
    // most one bar runs through the vertex's neighborhood (two would
    // cross), so it hosts the links, each on the side the other bar
    // departs into; collinear neighbors get the lower side.
    let mut at_vertex: BTreeMap<VertexId, Vec<(usize, Rational)>> = BTreeMap::new();
    for (bi, w) in work.iter().enumerate() {
        for (lam, v) in &w.verts {
            at_vertex.entry(*v).or_default().push((bi, lam.clone()));
        }
    }
    for (_, present) in at_vertex {
        if present.len() < 2 {
            continue;
        }
        let interior = |lam: &Rational| lam.is_positive() && *lam < Rational::one();
        let host = present
            .iter()
            .position(|(_, lam)| interior(lam))
            .unwrap_or(0);
        let (hb, hlam) = present[host].clone();
        for (i, (ob, olam)) in present.iter().enumerate() {
            if i == host {
                continue;
            }
            if interior(olam) {
                return Err(PlusError::PreconditionViolated(
                    "two bars run through one vertex",
                ));
            }
            let dep = if olam.is_zero() {
                work[*ob].dir.clone()
            } else {
                (-&work[*ob].dir.0, -&work[*ob].dir.1)
            };
            obligations.push(Obligation::EvenEndpointLink {
                bar: hb,
                other_bar: *ob,
                lam: hlam.clone(),
                plus: cross_rr(&work[hb].dir, &dep).is_positive(),
            });
        }
    }

    assemble(augmented, work, obligations)
        .map_err(|e| PlusError::EmbeddingFailed(e.to_string()))
}

fn find(parent: &mut BTreeMap<Rational, Rational>, x: &Rational) -> Rational {
    let p = parent[x].clone();
    if p == *x {
        return p;
    }
    let root = find(parent, &p);
    parent.insert(x.clone(), root.clone());
    root
}

fn union(parent: &mut BTreeMap<Rational, Rational>, a: &Rational, b: &Rational) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent.insert(hi, lo);
    }
}

/// An augmentation together with its weak-simplicity witness.
#[derive(Debug, Clone)]
pub struct PlusSolution {
    pub outcome: PlusOutcome,
    /// Euler tour of the augmented graph realized by the certificate.
    pub tour: Tour,
    pub certificate: PerturbationCertificate,
}

/// Computes the insertion, draws the augmented graph, and certifies it.
/// Insertion never subdivides, so a drawing that would demand a forced
/// cut is reported as a failure instead of being retried.
pub fn solve_plus(ms: &SegmentMultiset) -> Result<PlusSolution, PlusError> {
    let outcome = wspr_plus(ms)?;
    let eps = crate::graph::choose_epsilon(&outcome.layout.gstar)
        .ok_or(PlusError::PreconditionViolated("graph has no vertex pair"))?;
    match draw_and_certify(&outcome.layout, &eps) {
        Ok((tour, certificate)) => Ok(PlusSolution {
            outcome,
            tour,
            certificate,
        }),
        Err(EmbedFail::NeedsCut { .. }) => Err(PlusError::EmbeddingFailed(
            "drawing demanded an edge subdivision".into(),
        )),
        Err(EmbedFail::Fail(e)) => Err(PlusError::EmbeddingFailed(e.to_string())),
    }
}

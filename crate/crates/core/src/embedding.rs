//! Drawing of a subdivided bar partition as a simple geometric graph,
//! and the collapse of the drawing's certificate back onto the
//! subdivided graph.
//!
//! Each bar's pieces become parallel strands at small rational offsets
//! from the support: matching paths outermost, the two spanning paths
//! next, leftover polygons stacked between spanning path and support.
//! Strand ends are retracted slightly along the bar, which keeps
//! strands of different bars apart near a shared graph vertex; the
//! retraction is strictly larger than any strand offset, so everything
//! that still has to meet does so well inside the vertex neighborhood.
//! There the wiring recorded by the subdivision phases is drawn one
//! connector at a time, each candidate segment validated exactly
//! against everything drawn so far and rerouted around obstacles. A
//! connector blocked by a strand that passes straight through the
//! neighborhood cannot be drawn at all; that piece gets cut at the
//! vertex and the whole drawing restarts.
//!
//! The finished drawing is handed to the face machinery for a weakly
//! simple tour and a perturbation certificate. Every auxiliary vertex
//! of the drawing lives in exactly one vertex neighborhood, so
//! straightening each auxiliary stretch of the drawn tour onto its
//! vertex collapses that certificate into one for the subdivided graph.

use std::collections::BTreeMap;

use num_traits::One;

use crate::certify::{verify_certificate, BendPoint, PerturbationCertificate};
use crate::geom::{
    classify_pair, point_in_segment_interior, pow2_scale, rat, rat_int, PairClass, Point, Rational,
    Segment,
};
use crate::graph::{build_graph, choose_epsilon, SegmentGraph, SegmentMultiset, Tour, VertexId};
use crate::star::{
    assemble, wspr_star, Assign, AssignClass, BarWork, GammaComp, Obligation, PortRef, StarError,
    StarOutcome,
};
use crate::tour::{certificate_from_tour, weakly_simple_tour};

/// What a drawn edge stands for: the straight image of one subdivided
/// piece, or auxiliary wiring inside a vertex neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ELabel {
    Real { bar: usize, piece: usize },
    Aux,
}

#[derive(Debug, Clone)]
struct EEdge {
    a: usize,
    b: usize,
    label: ELabel,
}

/// Why an edge insertion was rejected.
enum Blocked {
    /// An existing vertex lies strictly inside the candidate segment.
    Vertex(usize),
    /// The candidate meets the existing edge in one point interior to
    /// it (a crossing, or an endpoint of the candidate resting on it).
    Edge { idx: usize, at: Box<Point> },
    /// Degenerate or overlapping: no single point is to blame.
    Unroutable,
}

enum ChainErr {
    NeedsCut { bar: usize, piece: usize },
    Dead,
}

/// A drawing failure. `NeedsCut` is repairable: the named piece runs
/// straight through the neighborhood of the named subdivided-graph
/// vertex and must be cut there.
pub(crate) enum EmbedFail {
    NeedsCut {
        bar: usize,
        piece: usize,
        anchor: usize,
    },
    Fail(StarError),
}

fn fatal(msg: &str) -> EmbedFail {
    EmbedFail::Fail(StarError::EmbeddingOverlap(msg.into()))
}

/// The drawing under construction: exact points, edges, and for every
/// vertex the subdivided-graph vertex whose neighborhood it belongs to.
#[derive(Debug, Clone)]
pub(crate) struct EmbedSpace {
    pts: Vec<Point>,
    by_pt: BTreeMap<Point, usize>,
    anchor: Vec<usize>,
    edges: Vec<EEdge>,
}

impl EmbedSpace {
    fn new() -> Self {
        EmbedSpace {
            pts: Vec::new(),
            by_pt: BTreeMap::new(),
            anchor: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn seg(&self, e: &EEdge) -> Segment {
        Segment::new(self.pts[e.a].clone(), self.pts[e.b].clone())
    }

    /// Adds a vertex unless its point collides with an existing vertex
    /// or lands inside an existing edge.
    fn try_vertex(&mut self, p: Point, anchor: usize) -> Option<usize> {
        if self.by_pt.contains_key(&p) {
            return None;
        }
        if self
            .edges
            .iter()
            .any(|e| point_in_segment_interior(&p, &self.seg(e)))
        {
            return None;
        }
        let id = self.pts.len();
        self.by_pt.insert(p.clone(), id);
        self.pts.push(p);
        self.anchor.push(anchor);
        Some(id)
    }

    fn vertex(&mut self, p: Point, anchor: usize) -> Result<usize, EmbedFail> {
        let shown = format!("{p}");
        self.try_vertex(p, anchor)
            .ok_or_else(|| fatal(&format!("vertex placement collision at {shown}")))
    }

    /// Inserts the edge after validating the simple-geometric-graph
    /// invariants against everything drawn so far.
    fn add_edge(&mut self, a: usize, b: usize, label: ELabel) -> Result<(), Blocked> {
        if a == b {
            return Err(Blocked::Unroutable);
        }
        let s = Segment::new(self.pts[a].clone(), self.pts[b].clone());
        for v in 0..self.pts.len() {
            if v != a && v != b && point_in_segment_interior(&self.pts[v], &s) {
                return Err(Blocked::Vertex(v));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            match classify_pair(&s, &self.seg(e)) {
                PairClass::Disjoint => {}
                PairClass::SharedEndpoint => {
                    // Points deduplicate to ids, so a shared point is a
                    // shared vertex.
                    debug_assert!(e.a == a || e.a == b || e.b == a || e.b == b);
                }
                PairClass::EndpointOnInterior => {
                    // Existing endpoints inside the candidate were caught
                    // by the vertex scan, so here an endpoint of the
                    // candidate rests inside the existing edge.
                    let at = if point_in_segment_interior(&s.a, &self.seg(e)) {
                        s.a.clone()
                    } else {
                        s.b.clone()
                    };
                    return Err(Blocked::Edge {
                        idx: i,
                        at: Box::new(at),
                    });
                }
                PairClass::Crossing => {
                    let at = crossing_point(&s, &self.seg(e));
                    return Err(Blocked::Edge {
                        idx: i,
                        at: Box::new(at),
                    });
                }
                PairClass::Overlap => return Err(Blocked::Unroutable),
            }
        }
        self.edges.push(EEdge { a, b, label });
        Ok(())
    }

    /// Splits auxiliary edge `idx` at the interior point `at`, keeping
    /// both halves in place. Returns the new middle vertex.
    fn split_aux(&mut self, idx: usize, at: Point) -> Option<usize> {
        debug_assert!(matches!(self.edges[idx].label, ELabel::Aux));
        debug_assert_eq!(
            self.anchor[self.edges[idx].a],
            self.anchor[self.edges[idx].b],
            "auxiliary edge spans two neighborhoods"
        );
        if self.by_pt.contains_key(&at) {
            return None;
        }
        for (i, e) in self.edges.iter().enumerate() {
            if i != idx && point_in_segment_interior(&at, &self.seg(e)) {
                return None;
            }
        }
        let mid = self.pts.len();
        self.by_pt.insert(at.clone(), mid);
        self.pts.push(at);
        self.anchor.push(self.anchor[self.edges[idx].a]);
        let old_b = self.edges[idx].b;
        self.edges[idx].b = mid;
        self.edges.push(EEdge {
            a: mid,
            b: old_b,
            label: ELabel::Aux,
        });
        Some(mid)
    }

    /// Draws an auxiliary connection from `a` to `b`, chaining through
    /// blocking vertices and splitting blocking auxiliary edges. A
    /// blocking strand that has an end in this neighborhood is passed
    /// through that end; one that passes straight through is reported
    /// for cutting.
    fn route_chain(
        &mut self,
        a: usize,
        b: usize,
        anchor: usize,
        fuel: &mut u32,
    ) -> Result<(), ChainErr> {
        if *fuel == 0 {
            return Err(ChainErr::Dead);
        }
        *fuel -= 1;
        match self.add_edge(a, b, ELabel::Aux) {
            Ok(()) => Ok(()),
            Err(Blocked::Vertex(v)) => {
                if self.anchor[v] != anchor || v == a || v == b {
                    return Err(ChainErr::Dead);
                }
                self.route_chain(a, v, anchor, fuel)?;
                self.route_chain(v, b, anchor, fuel)
            }
            Err(Blocked::Edge { idx, at }) => match self.edges[idx].label {
                ELabel::Real { bar, piece } => {
                    let (ea, eb) = (self.edges[idx].a, self.edges[idx].b);
                    let via = if self.anchor[ea] == anchor {
                        Some(ea)
                    } else if self.anchor[eb] == anchor {
                        Some(eb)
                    } else {
                        None
                    };
                    match via {
                        Some(v) if v != a && v != b => {
                            self.route_chain(a, v, anchor, fuel)?;
                            self.route_chain(v, b, anchor, fuel)
                        }
                        _ => Err(ChainErr::NeedsCut { bar, piece }),
                    }
                }
                ELabel::Aux => {
                    let Some(mid) = self.split_aux(idx, *at) else {
                        return Err(ChainErr::Dead);
                    };
                    if self.anchor[mid] != anchor {
                        return Err(ChainErr::Dead);
                    }
                    self.route_chain(a, mid, anchor, fuel)?;
                    self.route_chain(mid, b, anchor, fuel)
                }
            },
            Err(Blocked::Unroutable) => Err(ChainErr::Dead),
        }
    }

    /// Draws one auxiliary connection, trying the straight segment and
    /// then bowed detours on either side with shrinking amplitude. Each
    /// candidate runs on a snapshot; the first success is kept.
    fn route(&mut self, a: usize, b: usize, anchor: usize) -> Result<(), EmbedFail> {
        let mut needs: Option<(usize, usize)> = None;
        for cand in 0..13u32 {
            let saved = self.clone();
            let mid = if cand == 0 {
                None
            } else {
                let j = (cand - 1) / 2;
                let sign = if cand % 2 == 1 { 1 } else { -1 };
                let t = rat(sign, 4 * (1i64 << j));
                let pa = &self.pts[a];
                let pb = &self.pts[b];
                let dx = &pb.x - &pa.x;
                let dy = &pb.y - &pa.y;
                Some(Point::new(
                    (&pa.x + &pb.x) / rat_int(2) - &t * &dy,
                    (&pa.y + &pb.y) / rat_int(2) + &t * &dx,
                ))
            };
            let mut fuel = 48u32;
            let run = match mid {
                None => self.route_chain(a, b, anchor, &mut fuel),
                Some(m) => match self.try_vertex(m, anchor) {
                    None => Err(ChainErr::Dead),
                    Some(v) => self
                        .route_chain(a, v, anchor, &mut fuel)
                        .and_then(|()| self.route_chain(v, b, anchor, &mut fuel)),
                },
            };
            match run {
                Ok(()) => return Ok(()),
                Err(ChainErr::NeedsCut { bar, piece }) => {
                    needs.get_or_insert((bar, piece));
                    *self = saved;
                }
                Err(ChainErr::Dead) => *self = saved,
            }
        }
        match needs {
            Some((bar, piece)) => Err(EmbedFail::NeedsCut { bar, piece, anchor }),
            None => Err(fatal(&format!(
                "no route between drawn vertices {a} and {b}"
            ))),
        }
    }

    /// Two edge-disjoint connections between the same pair.
    fn route_double(&mut self, a: usize, b: usize, anchor: usize) -> Result<(), EmbedFail> {
        self.route(a, b, anchor)?;
        self.route(a, b, anchor)
    }

    fn multiset(&self) -> SegmentMultiset {
        SegmentMultiset::new(false, self.edges.iter().map(|e| (self.seg(e), 1)).collect())
    }
}

/// Intersection point of two properly crossing segments.
fn crossing_point(s: &Segment, t: &Segment) -> Point {
    let d1 = (&s.b.x - &s.a.x, &s.b.y - &s.a.y);
    let d2 = (&t.b.x - &t.a.x, &t.b.y - &t.a.y);
    let denom = &d1.0 * &d2.1 - &d1.1 * &d2.0;
    debug_assert!(!denom.eq(&rat_int(0)));
    let w = (&t.a.x - &s.a.x, &t.a.y - &s.a.y);
    let tpar = (&w.0 * &d2.1 - &w.1 * &d2.0) / &denom;
    Point::new(&s.a.x + &d1.0 * &tpar, &s.a.y + &d1.1 * &tpar)
}

/// Per-bar drawing scales: `h` is the offset between strand levels and
/// `rho` the port retraction, both in support parameter units. Gamma
/// components get the levels between the support and the upper
/// spanning path, ordered so that a component's closing detour at its
/// left end never crosses a higher band (those start at or to the
/// right of it).
struct BarFrame {
    h: Rational,
    rho: Rational,
    gamma_level: Vec<i64>,
    lmax: i64,
}

fn level_offset(frame: &BarFrame, level: i64) -> Rational {
    &frame.h * rat_int(level)
}

/// Strand level of a non-gamma assignment.
fn level_of(assign: Assign, frame: &BarFrame) -> Option<i64> {
    match assign {
        Assign::MPlus(_) => Some(frame.lmax + 2),
        Assign::OPlus(_) => Some(frame.lmax + 1),
        Assign::OMinus(_) => Some(-1),
        Assign::MMinus(_) => Some(-2),
        Assign::Gamma(_) | Assign::Free => None,
    }
}

/// World point at parameter `lam`, displaced by `off` (in parameter
/// units) along the left normal of the support direction.
fn world2(w: &BarWork, lam: &Rational, off: &Rational) -> Point {
    Point::new(
        &w.origin_point.x + &w.dir.0 * lam - &w.dir.1 * off,
        &w.origin_point.y + &w.dir.1 * lam + &w.dir.0 * off,
    )
}

fn cross_dir(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// Chooses `h` and `rho` for every bar. The binding constraints: the
/// farthest strand offset must stay below a fixed fraction of `eps`
/// scaled by the shallowest crossing angle between bars that share a
/// vertex (so strands of one bar cannot reach another bar's retraction
/// zone), and the retraction must strictly exceed every offset while
/// staying well below the inter-vertex separation.
fn frames(out: &StarOutcome, eps: &Rational) -> Vec<BarFrame> {
    let work = &out.work;
    let mut smin: Option<Rational> = None;
    for i in 0..work.len() {
        for j in i + 1..work.len() {
            let share = work[i]
                .verts
                .iter()
                .any(|(_, v)| work[j].verts.iter().any(|(_, u)| u == v));
            if !share {
                continue;
            }
            let c = cross_dir(&work[i].dir, &work[j].dir);
            if c == rat_int(0) {
                // Bars on one line meeting at a point: their strands run
                // parallel and the retraction channel keeps them apart,
                // so the pair imposes no angle constraint.
                continue;
            }
            let s = &c * &c / (&work[i].len2 * &work[j].len2);
            if smin.as_ref().is_none_or(|m| s < *m) {
                smin = Some(s);
            }
        }
    }
    let mut clamp = smin.unwrap_or_else(Rational::one);
    if clamp > Rational::one() {
        clamp = Rational::one();
    }
    let e16sq = eps * eps / rat_int(256);
    let cap2 = &e16sq * &clamp / rat_int(4);
    work.iter()
        .map(|w| {
            let lmax = w.gammas.len() as i64;
            let maxk = lmax + 2;
            let h = pow2_scale(&(&w.len2 * rat_int(maxk * maxk)), &cap2);
            let rho = pow2_scale(&w.len2, &(eps * eps / rat_int(64)));
            let mut order: Vec<usize> = (0..w.gammas.len()).collect();
            order.sort_by(|&x, &y| (&w.gammas[x].left, x).cmp(&(&w.gammas[y].left, y)));
            let mut gamma_level = vec![0i64; w.gammas.len()];
            for (pos, &gi) in order.iter().enumerate() {
                gamma_level[gi] = pos as i64 + 1;
            }
            BarFrame {
                h,
                rho,
                gamma_level,
                lmax,
            }
        })
        .collect()
}

/// Euler circuit of a gamma component over its piece intervals,
/// starting and ending at the component's left end. Returns the steps
/// as (piece, from, to).
fn gamma_circuit(w: &BarWork, comp: &GammaComp) -> Vec<(usize, Rational, Rational)> {
    let mut adj: BTreeMap<Rational, Vec<(usize, Rational)>> = BTreeMap::new();
    for &pi in &comp.pieces {
        let p = &w.pieces[pi];
        adj.entry(p.lo.clone())
            .or_default()
            .push((pi, p.hi.clone()));
        adj.entry(p.hi.clone())
            .or_default()
            .push((pi, p.lo.clone()));
    }
    for list in adj.values_mut() {
        list.sort_by(|a, b| (&a.1, a.0).cmp(&(&b.1, b.0)));
    }
    let mut used = vec![false; w.pieces.len()];
    let mut stack: Vec<Rational> = vec![comp.left.clone()];
    let mut arrive: Vec<Option<usize>> = vec![None];
    let mut circuit_rev: Vec<(usize, Rational, Rational)> = Vec::new();
    while let Some(node) = stack.last().cloned() {
        let pick = adj[&node]
            .iter()
            .find(|(pi, _)| !used[*pi])
            .map(|(pi, other)| (*pi, other.clone()));
        match pick {
            Some((pi, other)) => {
                used[pi] = true;
                stack.push(other);
                arrive.push(Some(pi));
            }
            None => {
                stack.pop();
                if let Some(Some(pi)) = arrive.pop() {
                    let from = stack.last().expect("arrival implies a predecessor").clone();
                    circuit_rev.push((pi, from, node));
                }
            }
        }
    }
    circuit_rev.reverse();
    circuit_rev
}

/// Port vertex of a feature's piece list at a boundary parameter,
/// preferring the piece that ends there.
fn boundary_port(
    port: &BTreeMap<(usize, usize, bool), usize>,
    w: &BarWork,
    bar: usize,
    pieces: &[usize],
    lam: &Rational,
) -> Option<usize> {
    for &pi in pieces {
        if w.pieces[pi].hi == *lam {
            if let Some(&v) = port.get(&(bar, pi, false)) {
                return Some(v);
            }
        }
    }
    for &pi in pieces {
        if w.pieces[pi].lo == *lam {
            if let Some(&v) = port.get(&(bar, pi, true)) {
                return Some(v);
            }
        }
    }
    None
}

/// Station vertex at `lam` on the bar, scanning feature classes in the
/// same priority order the subdivision phases used when ensuring the
/// station exists.
fn station_port(
    port: &BTreeMap<(usize, usize, bool), usize>,
    w: &BarWork,
    bar: usize,
    lam: &Rational,
    prefer_minus: bool,
) -> Option<usize> {
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
    for class in order {
        for (pi, piece) in w.pieces.iter().enumerate() {
            if !class.matches(piece.assign) {
                continue;
            }
            if piece.lo == *lam {
                if let Some(&v) = port.get(&(bar, pi, true)) {
                    return Some(v);
                }
            }
            if piece.hi == *lam {
                if let Some(&v) = port.get(&(bar, pi, false)) {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Draws the whole outcome. On success the drawing is a connected
/// simple geometric graph with even degrees whose labeled edges cover
/// every piece exactly once.
fn embed(out: &StarOutcome, eps: &Rational) -> Result<EmbedSpace, EmbedFail> {
    let work = &out.work;
    let gv: BTreeMap<Point, usize> = out
        .gstar
        .vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let anchor_at = |w: &BarWork, lam: &Rational| -> Result<usize, EmbedFail> {
        gv.get(&w.world(lam))
            .copied()
            .ok_or_else(|| fatal("piece boundary is not a graph vertex"))
    };
    let frames = frames(out, eps);
    let mut space = EmbedSpace::new();
    // (bar, piece, is_lo_end) -> drawn port vertex
    let mut port: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
    // matching-path end -> drawn port vertex
    let mut m_end: BTreeMap<PortRef, usize> = BTreeMap::new();
    // (bar, gamma) -> (first departure port, last arrival port)
    let mut gamma_ends: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();

    // Strands of the matching and spanning features, one straight edge
    // per piece between retracted ports.
    for (bi, w) in work.iter().enumerate() {
        let frame = &frames[bi];
        for (pi, piece) in w.pieces.iter().enumerate() {
            if piece.assign == Assign::Free {
                return Err(fatal("unassigned piece survived the phases"));
            }
            let Some(level) = level_of(piece.assign, frame) else {
                continue;
            };
            let off = level_offset(frame, level);
            let lo_vid = space.vertex(
                world2(w, &(&piece.lo + &frame.rho), &off),
                anchor_at(w, &piece.lo)?,
            )?;
            let hi_vid = space.vertex(
                world2(w, &(&piece.hi - &frame.rho), &off),
                anchor_at(w, &piece.hi)?,
            )?;
            if space
                .add_edge(lo_vid, hi_vid, ELabel::Real { bar: bi, piece: pi })
                .is_err()
            {
                return Err(fatal("strand placement collided"));
            }
            port.insert((bi, pi, true), lo_vid);
            port.insert((bi, pi, false), hi_vid);
        }
    }

    // Bridges between consecutive pieces of each matching path and
    // spanning path, plus the registry of dangling matching ends.
    for (bi, w) in work.iter().enumerate() {
        let bridge = |space: &mut EmbedSpace, list: &[usize]| -> Result<(), EmbedFail> {
            for pair in list.windows(2) {
                let (li, ri) = (pair[0], pair[1]);
                debug_assert_eq!(w.pieces[li].hi, w.pieces[ri].lo, "path pieces out of order");
                let a = port[&(bi, li, false)];
                let b = port[&(bi, ri, true)];
                if space.add_edge(a, b, ELabel::Aux).is_err() {
                    return Err(fatal("bridge placement collided"));
                }
            }
            Ok(())
        };
        for (plus, paths) in [(true, &w.m_plus), (false, &w.m_minus)] {
            for (mi, path) in paths.iter().enumerate() {
                bridge(&mut space, &path.pieces)?;
                let first = *path.pieces.first().expect("matching path has pieces");
                let last = *path.pieces.last().expect("matching path has pieces");
                m_end.insert(
                    PortRef {
                        bar: bi,
                        plus,
                        path: mi,
                        left_end: true,
                    },
                    port[&(bi, first, true)],
                );
                m_end.insert(
                    PortRef {
                        bar: bi,
                        plus,
                        path: mi,
                        left_end: false,
                    },
                    port[&(bi, last, false)],
                );
            }
        }
        for comp in &w.o_comps {
            bridge(&mut space, &comp.plus)?;
            bridge(&mut space, &comp.minus)?;
        }
    }

    // Gamma components: Euler circuit over the pieces, each step at its
    // own height inside the component's band, consecutive steps joined
    // by short connectors at the shared parameter. The circuit is left
    // open at the component's left end; the closing runs through a
    // station (or the next component stacked above).
    for (bi, w) in work.iter().enumerate() {
        let frame = &frames[bi];
        for (gi, comp) in w.gammas.iter().enumerate() {
            let steps = gamma_circuit(w, comp);
            if steps.is_empty() {
                return Err(fatal("empty leftover component"));
            }
            let base = level_offset(frame, frame.gamma_level[gi]);
            let eta = &frame.h / rat_int(2 * (steps.len() as i64 + 1));
            let mut step_ports: Vec<(usize, usize)> = Vec::new(); // (departure, arrival)
            for (j, (pi, from, to)) in steps.iter().enumerate() {
                let off = &base + &eta * rat_int(j as i64);
                let piece = &w.pieces[*pi];
                let lo_vid = space.vertex(
                    world2(w, &(&piece.lo + &frame.rho), &off),
                    anchor_at(w, &piece.lo)?,
                )?;
                let hi_vid = space.vertex(
                    world2(w, &(&piece.hi - &frame.rho), &off),
                    anchor_at(w, &piece.hi)?,
                )?;
                if space
                    .add_edge(lo_vid, hi_vid, ELabel::Real { bar: bi, piece: *pi })
                    .is_err()
                {
                    return Err(fatal("strand placement collided"));
                }
                port.insert((bi, *pi, true), lo_vid);
                port.insert((bi, *pi, false), hi_vid);
                let (dep, arr) = if *from == piece.lo {
                    (lo_vid, hi_vid)
                } else {
                    (hi_vid, lo_vid)
                };
                debug_assert!(*from == piece.lo || *from == piece.hi);
                debug_assert!(*to == piece.lo || *to == piece.hi);
                step_ports.push((dep, arr));
            }
            for j in 0..steps.len() - 1 {
                debug_assert_eq!(steps[j].2, steps[j + 1].1, "circuit steps disconnected");
                let a = anchor_at(w, &steps[j].2)?;
                space.route(step_ports[j].1, step_ports[j + 1].0, a)?;
            }
            gamma_ends.insert(
                (bi, gi),
                (step_ports[0].0, step_ports[steps.len() - 1].1),
            );
        }
    }

    // Wiring recorded by the phases, drawn inside the neighborhoods.
    for ob in &out.obligations {
        match ob {
            Obligation::OClosing { bar, comp } => {
                let w = &work[*bar];
                let c = &w.o_comps[*comp];
                let plus_first = *c.plus.first().expect("spanning path has pieces");
                let plus_last = *c.plus.last().expect("spanning path has pieces");
                let minus_first = *c.minus.first().expect("spanning path has pieces");
                let minus_last = *c.minus.last().expect("spanning path has pieces");
                let a1 = anchor_at(w, &c.r1)?;
                space.route(
                    port[&(*bar, plus_first, true)],
                    port[&(*bar, minus_first, true)],
                    a1,
                )?;
                let a2 = anchor_at(w, &c.r2)?;
                space.route(
                    port[&(*bar, plus_last, false)],
                    port[&(*bar, minus_last, false)],
                    a2,
                )?;
            }
            Obligation::OCutToM {
                bar,
                plus,
                m_path,
                lam,
            } => {
                let w = &work[*bar];
                let path = if *plus {
                    &w.m_plus[*m_path]
                } else {
                    &w.m_minus[*m_path]
                };
                let m_vid = boundary_port(&port, w, *bar, &path.pieces, lam)
                    .ok_or_else(|| fatal("matching path has no vertex at the hookup"))?;
                let o_vid = w
                    .o_comps
                    .iter()
                    .find_map(|c| {
                        if c.r1 > *lam || *lam > c.r2 {
                            return None;
                        }
                        let list = if *plus { &c.plus } else { &c.minus };
                        boundary_port(&port, w, *bar, list, lam)
                    })
                    .ok_or_else(|| fatal("spanning path has no vertex at the hookup"))?;
                let a = anchor_at(w, lam)?;
                space.route_double(m_vid, o_vid, a)?;
            }
            Obligation::GammaToStation { bar, gamma, lam } => {
                let w = &work[*bar];
                let frame = &frames[*bar];
                let lvl = frame.gamma_level[*gamma];
                let chained = (0..w.gammas.len()).find(|&g2| {
                    frame.gamma_level[g2] == lvl + 1 && w.gammas[g2].left == *lam
                });
                let target = match chained {
                    Some(g2) => gamma_ends[&(*bar, g2)].0,
                    None => station_port(&port, w, *bar, lam, false)
                        .ok_or_else(|| fatal("missing station for a leftover component"))?,
                };
                let (first_dep, last_arr) = gamma_ends[&(*bar, *gamma)];
                let a = anchor_at(w, lam)?;
                space.route(last_arr, target, a)?;
                space.route(target, first_dep, a)?;
            }
            Obligation::StationLink {
                bar,
                plus,
                lam,
                port: pref,
            } => {
                let w = &work[*bar];
                let station = station_port(&port, w, *bar, lam, !*plus)
                    .ok_or_else(|| fatal("missing station for a matching end"))?;
                let end = *m_end
                    .get(pref)
                    .ok_or_else(|| fatal("dangling end not drawn"))?;
                let a = anchor_at(w, lam)?;
                space.route(end, station, a)?;
            }
            Obligation::MEndPairing { a: pa, b: pb } => {
                let va = *m_end.get(pa).ok_or_else(|| fatal("dangling end not drawn"))?;
                let vb = *m_end.get(pb).ok_or_else(|| fatal("dangling end not drawn"))?;
                let anchor = space.anchor[va];
                if anchor != space.anchor[vb] {
                    return Err(fatal("paired ends in different neighborhoods"));
                }
                space.route(va, vb, anchor)?;
            }
            Obligation::EvenEndpointLink {
                bar,
                other_bar,
                lam,
                plus,
            } => {
                let w = &work[*bar];
                let host = station_port(&port, w, *bar, lam, !*plus)
                    .ok_or_else(|| fatal("missing station for an endpoint hookup"))?;
                let p = w.world(lam);
                let other_lam = work[*other_bar].param(&p);
                let other = station_port(&port, &work[*other_bar], *other_bar, &other_lam, false)
                    .ok_or_else(|| fatal("missing endpoint station on the other bar"))?;
                let a = anchor_at(w, lam)?;
                space.route_double(host, other, a)?;
            }
        }
    }

    // Connectivity sweep: components that only touch inside a
    // neighborhood get a double connector there.
    let mut rounds = space.pts.len() + 1;
    loop {
        let roots = components(&space);
        let mut distinct: Vec<usize> = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() <= 1 {
            break;
        }
        rounds = rounds.checked_sub(1).ok_or_else(|| fatal("sweep stalled"))?;
        // anchor -> (root -> smallest vertex)
        let mut by_anchor: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
        for (v, &root) in roots.iter().enumerate() {
            by_anchor
                .entry(space.anchor[v])
                .or_default()
                .entry(root)
                .or_insert(v);
        }
        let hook = by_anchor
            .into_iter()
            .find_map(|(anchor, comps)| {
                if comps.len() < 2 {
                    return None;
                }
                let mut it = comps.into_values();
                let v1 = it.next().expect("two components present");
                let v2 = it.next().expect("two components present");
                Some((anchor, v1, v2))
            })
            .ok_or_else(|| fatal("drawing is disconnected beyond repair"))?;
        space.route_double(hook.1, hook.2, hook.0)?;
    }

    let mut deg = vec![0usize; space.pts.len()];
    for e in &space.edges {
        deg[e.a] += 1;
        deg[e.b] += 1;
    }
    if deg.iter().any(|d| d % 2 != 0) {
        return Err(fatal("drawn degrees are not all even"));
    }
    Ok(space)
}

/// Connected-component root per drawn vertex.
fn components(space: &EmbedSpace) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..space.pts.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &space.edges {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..space.pts.len())
        .map(|v| find(&mut parent, v))
        .collect()
}

/// Straightens every auxiliary stretch of the drawn tour onto its
/// neighborhood vertex, producing a tour of the subdivided graph with
/// the drawn detours kept as bend points.
fn collapse(
    space: &EmbedSpace,
    gp: &SegmentGraph,
    tour_p: &Tour,
    cert_p: &PerturbationCertificate,
    eps: &Rational,
) -> Result<(Tour, PerturbationCertificate), StarError> {
    let overlap = |msg: &str| StarError::EmbeddingOverlap(msg.into());
    let vid: Vec<usize> = gp
        .vertices
        .iter()
        .map(|p| {
            space
                .by_pt
                .get(p)
                .copied()
                .ok_or_else(|| overlap("drawn tour vertex missing from the drawing"))
        })
        .collect::<Result<_, _>>()?;
    let mut label: BTreeMap<(usize, usize), ELabel> = BTreeMap::new();
    for e in &space.edges {
        let key = (e.a.min(e.b), e.a.max(e.b));
        if label.insert(key, e.label).is_some() {
            return Err(overlap("parallel drawn edges"));
        }
    }
    let m = tour_p.len();
    let lab_at = |i: usize| -> ELabel {
        let (u, v) = tour_p.step(i);
        let (a, b) = (vid[u.0], vid[v.0]);
        label[&(a.min(b), a.max(b))]
    };
    let reals: Vec<usize> = (0..m)
        .filter(|&i| matches!(lab_at(i), ELabel::Real { .. }))
        .collect();
    if reals.is_empty() {
        return Err(overlap("drawn tour has no piece steps"));
    }
    let k = reals.len();
    let mut verts = Vec::with_capacity(k);
    let mut perturbed = Vec::with_capacity(k);
    let mut bends = Vec::new();
    for (j, &rj) in reals.iter().enumerate() {
        let start = vid[tour_p.vertices[rj].0];
        verts.push(VertexId(space.anchor[start]));
        perturbed.push(cert_p.perturbed[rj].clone());
        let next_r = reals[(j + 1) % k];
        let target = vid[tour_p.vertices[next_r].0];
        let mut pos = rj;
        loop {
            for b in &cert_p.bends {
                if b.after == pos {
                    bends.push(BendPoint {
                        after: j,
                        point: b.point.clone(),
                    });
                }
            }
            pos = (pos + 1) % m;
            if pos == next_r {
                break;
            }
            let ev = vid[tour_p.vertices[pos].0];
            if space.anchor[ev] != space.anchor[target] {
                return Err(overlap("auxiliary stretch crosses neighborhoods"));
            }
            bends.push(BendPoint {
                after: j,
                point: cert_p.perturbed[pos].clone(),
            });
        }
    }
    let tour = Tour::new(verts);
    let certificate = PerturbationCertificate {
        tour: tour.clone(),
        eps: eps.clone(),
        perturbed,
        bends,
    };
    Ok((tour, certificate))
}

/// A subdivision together with its weak-simplicity witness.
#[derive(Debug, Clone)]
pub struct StarSolution {
    pub outcome: StarOutcome,
    /// Euler tour of `outcome.gstar` realized by the certificate.
    pub tour: Tour,
    pub certificate: PerturbationCertificate,
}

/// Draws the outcome once at the given scale, tours the drawing, and
/// collapses the result into a verified certificate of the outcome's
/// graph.
pub(crate) fn draw_and_certify(
    outcome: &StarOutcome,
    eps: &Rational,
) -> Result<(Tour, PerturbationCertificate), EmbedFail> {
    let space = embed(outcome, eps)?;
    let gp = build_graph(&space.multiset()).map_err(|e| {
        EmbedFail::Fail(StarError::EmbeddingOverlap(format!("drawing rejected: {e}")))
    })?;
    let tour_p = weakly_simple_tour(&gp)
        .map_err(|e| EmbedFail::Fail(StarError::TourFailed(e.to_string())))?;
    let cert_p = certificate_from_tour(&gp, &tour_p)
        .map_err(|e| EmbedFail::Fail(StarError::CertificateFailed(e.to_string())))?;
    let (tour, certificate) =
        collapse(&space, &gp, &tour_p, &cert_p, eps).map_err(EmbedFail::Fail)?;
    verify_certificate(&outcome.gstar, &certificate)
        .map_err(|e| EmbedFail::Fail(StarError::CertificateFailed(e.to_string())))?;
    Ok((tour, certificate))
}

/// Runs the subdivision phases, draws the result, and certifies the
/// subdivided graph. The certificate scale is chosen once from the
/// first subdivision; later forced cuts only split pieces at existing
/// vertex points, so the scale stays valid throughout.
pub fn solve_star(ms: &SegmentMultiset) -> Result<StarSolution, StarError> {
    let mut outcome = wspr_star(ms)?;
    let eps = choose_epsilon(&outcome.gstar)
        .ok_or(StarError::PreconditionViolated("graph has no vertex pair"))?;
    for _ in 0..64 {
        match draw_and_certify(&outcome, &eps) {
            Ok((tour, certificate)) => {
                return Ok(StarSolution {
                    outcome,
                    tour,
                    certificate,
                });
            }
            Err(EmbedFail::NeedsCut { bar, piece, anchor }) => {
                let point = outcome.gstar.vertices[anchor].clone();
                let lam = outcome.work[bar].param(&point);
                {
                    let p = &outcome.work[bar].pieces[piece];
                    if !(p.lo < lam && lam < p.hi) {
                        return Err(StarError::EmbeddingOverlap(
                            "forced cut point is not interior to the blocked piece".into(),
                        ));
                    }
                }
                let StarOutcome {
                    work: mut w,
                    obligations: obl,
                    ..
                } = outcome;
                w[bar].split(piece, &lam);
                outcome = assemble(ms, w, obl)?;
            }
            Err(EmbedFail::Fail(e)) => return Err(e),
        }
    }
    Err(StarError::EmbeddingOverlap(
        "forced-cut budget exhausted".into(),
    ))
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

    fn solved(input: &SegmentMultiset) -> StarSolution {
        let sol = solve_star(input).expect("solvable input");
        verify_certificate(&sol.outcome.gstar, &sol.certificate).expect("verifier accepts");
        assert!(check_eulerian(&sol.outcome.gstar));
        assert_eq!(
            sol.certificate.eps,
            choose_epsilon(&sol.outcome.gstar).expect("graph has vertices"),
            "certificate scale is the structural one"
        );
        sol
    }

    #[test]
    fn solves_simple_square() {
        let input = ms(vec![
            (seg(0, 0, 4, 0), 1),
            (seg(4, 0, 4, 4), 1),
            (seg(4, 4, 0, 4), 1),
            (seg(0, 4, 0, 0), 1),
        ]);
        let sol = solved(&input);
        assert_eq!(sol.outcome.plan.total(), 0);
        assert_eq!(sol.tour.len(), 4);
        assert_eq!(sol.certificate.perturbed.len(), 4);
    }

    #[test]
    fn solves_doubled_edge() {
        let input = ms(vec![(seg(0, 0, 4, 0), 2)]);
        let sol = solved(&input);
        assert_eq!(sol.outcome.plan.total(), 0);
        assert_eq!(sol.tour.len(), 2);
    }

    #[test]
    fn solves_four_parallel_copies() {
        let input = ms(vec![(seg(0, 0, 4, 0), 4)]);
        let sol = solved(&input);
        assert_eq!(sol.tour.len(), 4);
    }

    #[test]
    fn solves_nested_overlap_with_station() {
        let input = ms(vec![(seg(0, 0, 4, 0), 2), (seg(1, 0, 3, 0), 2)]);
        let sol = solved(&input);
        assert_eq!(sol.tour.len(), sol.outcome.star_multiset.size());
    }

    #[test]
    fn solves_t_junction() {
        let input = ms(vec![(seg(0, 0, 4, 0), 2), (seg(2, 0, 2, 3), 2)]);
        let sol = solved(&input);
        assert_eq!(sol.outcome.plan.total(), 1);
    }

    #[test]
    fn solves_odd_stubs() {
        let input = ms(vec![
            (seg(0, 0, 4, 0), 2),
            (seg(1, 0, 1, 2), 1),
            (seg(3, 0, 3, 2), 1),
            (seg(1, 2, 3, 2), 1),
            (seg(1, 0, 1, -2), 1),
            (seg(3, 0, 3, -2), 1),
            (seg(1, -2, 3, -2), 1),
        ]);
        let sol = solved(&input);
        assert_eq!(sol.outcome.plan.total(), 4);
    }

    #[test]
    fn solves_triangle_pair_miniature() {
        let input = ms(vec![
            (seg(0, 0, 2, 0), 1),
            (seg(0, 0, 1, 0), 1),
            (seg(1, 0, 2, 0), 1),
            (seg(1, 0, 6, 8), 1),
            (seg(6, 8, 7, 8), 1),
            (seg(7, 8, 1, 0), 1),
            (seg(1, 0, 6, -8), 1),
            (seg(6, -8, 7, -8), 1),
            (seg(7, -8, 1, 0), 1),
        ]);
        let sol = solved(&input);
        assert_eq!(sol.outcome.plan.total(), 1);
        assert_eq!(sol.outcome.plan.cuts.get(&0).cloned(), Some(vec![pt(1, 0)]));
    }

    #[test]
    fn solves_matching_path_inside_circuit() {
        let input = ms(vec![
            (seg(0, 0, 8, 0), 2),
            (seg(2, 0, 6, 0), 1),
            (seg(2, 0, 2, 4), 1),
            (seg(6, 0, 6, 4), 1),
            (seg(2, 4, 6, 4), 1),
        ]);
        let out = wspr_star(&input).expect("valid input");
        assert!(out
            .obligations
            .iter()
            .any(|o| matches!(o, Obligation::OCutToM { .. })));
        solved(&input);
    }

    #[test]
    fn solves_shallow_crossing_bars() {
        let input = ms(vec![(seg(0, 0, 100, 1), 2), (seg(0, 0, 100, 0), 2)]);
        solved(&input);
    }

    #[test]
    fn solves_collinear_chain_of_bars() {
        let input = ms(vec![(seg(0, 0, 4, 0), 2), (seg(4, 0, 8, 0), 2)]);
        solved(&input);
    }
}

//! Adversarial instance families, a reduction from planar monotone
//! rectilinear 3-SAT, and small brute-force oracles.
//!
//! The generators here produce the inputs the randomized and structural
//! test corpora run against: families that force many subdivisions or a
//! large insertion length, satisfiable formulas whose reductions come
//! with explicit weak-simplicity witnesses, and exhaustively enumerable
//! small graphs.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::certify::{BendPoint, PerturbationCertificate};
use crate::geom::{rat, rat_int, Point, Rational, Segment};
use crate::graph::{
    build_graph, check_eulerian, choose_epsilon, SegmentGraph, SegmentMultiset, Tour, VertexId,
};

fn pt_int(x: i64, y: i64) -> Point {
    Point::from_ints(x, y)
}

fn seg_int(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
    Segment::new(pt_int(x1, y1), pt_int(x2, y2))
}

/// Errors raised by the parametric family generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    InvalidParams(&'static str),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::InvalidParams(why) => write!(f, "invalid parameters: {why}"),
        }
    }
}

impl std::error::Error for InstanceError {}

/// A long covering edge over a collinear path with small cycles hanging
/// at every interior vertex. Any subdivision that admits a weakly
/// simple Euler tour must cut the covering edge at each interior
/// vertex, so the family pins the subdivision count from below.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub multiset: SegmentMultiset,
    /// Expanded instance index of the long covering edge (always 0).
    pub red: usize,
    /// Interior vertices of the covering edge, west to east.
    pub interior: Vec<Point>,
}

/// Builds the subdivision lower-bound family: the covering edge
/// `(0,0)-(n,0)`, `n` unit path edges beneath it, and two small
/// triangles (one above, one below) at each of the `n-1` interior
/// vertices. The graph is Eulerian with `7n-5` edges.
pub fn gen_subdivision_lowerbound(n: usize) -> LowerBoundInstance {
    assert!(n >= 2, "the family needs at least one interior vertex");
    let n_i = n as i64;
    let mut items = vec![(seg_int(0, 0, n_i, 0), 1)];
    for i in 1..=n_i {
        items.push((seg_int(i - 1, 0, i, 0), 1));
    }
    let mut interior = Vec::new();
    for i in 1..n_i {
        let v = pt_int(i, 0);
        interior.push(v.clone());
        for sign in [1i64, -1] {
            let left = Point::new(rat_int(i) - rat(1, 4), rat(sign, 4));
            let right = Point::new(rat_int(i) + rat(1, 4), rat(sign, 4));
            items.push((Segment::new(v.clone(), left.clone()), 1));
            items.push((Segment::new(left, right.clone()), 1));
            items.push((Segment::new(right, v.clone()), 1));
        }
    }
    LowerBoundInstance {
        multiset: SegmentMultiset::new(false, items),
        red: 0,
        interior,
    }
}

/// Which insertion lower-bound family to generate.
///
/// All three share a long covering edge over the segment from `(0,0)`
/// eastwards; they differ in how much structure hangs off it, which
/// controls the connectivity class the instance lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionFamily {
    /// Covering edge, a unit path, and doubled vertical stubs forming
    /// small cycles of exact length `delta`: Eulerian.
    Eulerian,
    /// Covering edge, a thin rectilinear zig-zag path, and hook paths:
    /// connected as a graph but with odd vertices.
    Connected,
    /// Covering edge and bare vertical stubs touching only its
    /// interior: connected as a point set but not as a graph.
    SupportConnected,
}

/// Parameters shared by the insertion lower-bound families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundParams {
    pub n: usize,
    /// Stub scale; must lie strictly between 0 and 1/3.
    pub delta: Rational,
}

/// An insertion lower-bound instance with its exact total edge length
/// (every segment in these families is axis-parallel, so the length is
/// rational).
#[derive(Debug, Clone)]
pub struct InsertionInstance {
    pub multiset: SegmentMultiset,
    pub total_length: Rational,
}

/// Generates one of the insertion lower-bound families.
///
/// Exact reported lengths: `2n + 2(n-1)delta` for [`InsertionFamily::Eulerian`],
/// `5n + 6n*delta` for [`InsertionFamily::Connected`] (which requires
/// even `n`), and `n + 2(n-1)delta` for
/// [`InsertionFamily::SupportConnected`].
pub fn gen_insertion_lowerbound(
    family: InsertionFamily,
    params: &LowerBoundParams,
) -> Result<InsertionInstance, InstanceError> {
    let n = params.n;
    let delta = &params.delta;
    if n == 0 {
        return Err(InstanceError::InvalidParams("n must be positive"));
    }
    if !(delta > &rat_int(0) && delta < &rat(1, 3)) {
        return Err(InstanceError::InvalidParams(
            "delta must lie strictly between 0 and 1/3",
        ));
    }
    let n_i = n as i64;
    match family {
        InsertionFamily::Eulerian => {
            let mut items = vec![(seg_int(0, 0, n_i, 0), 1)];
            for i in 1..=n_i {
                items.push((seg_int(i - 1, 0, i, 0), 1));
            }
            let half = delta / rat_int(2);
            for i in 1..n_i {
                for sign in [1i64, -1] {
                    let tip = Point::new(rat_int(i), rat_int(sign) * &half);
                    items.push((Segment::new(pt_int(i, 0), tip), 2));
                }
            }
            let total = rat_int(2 * n_i) + rat_int(2 * (n_i - 1)) * delta;
            Ok(InsertionInstance {
                multiset: SegmentMultiset::new(false, items),
                total_length: total,
            })
        }
        InsertionFamily::SupportConnected => {
            let mut items = vec![(seg_int(0, 0, n_i, 0), 1)];
            for i in 1..n_i {
                for sign in [1i64, -1] {
                    let tip = Point::new(rat_int(i), rat_int(sign) * delta);
                    items.push((Segment::new(pt_int(i, 0), tip), 1));
                }
            }
            let total = rat_int(n_i) + rat_int(2 * (n_i - 1)) * delta;
            Ok(InsertionInstance {
                multiset: SegmentMultiset::new(false, items),
                total_length: total,
            })
        }
        InsertionFamily::Connected => {
            if !n.is_multiple_of(2) {
                return Err(InstanceError::InvalidParams(
                    "the connected family requires even n",
                ));
            }
            let at = |x: i64, k: i64| Point::new(rat_int(x), rat_int(k) * delta);
            let mut items = vec![(seg_int(0, 0, 2 * n_i, 0), 1)];
            // Zig-zag path: up at x=0, across two units, down to the
            // axis, and over to the other side; the side alternates
            // with each block.
            items.push((Segment::new(at(0, 0), at(0, 1)), 1));
            for k in 1..=n_i {
                let side = if k % 2 == 1 { 1 } else { -1 };
                items.push((Segment::new(at(2 * k - 2, side), at(2 * k, side)), 1));
                items.push((Segment::new(at(2 * k, side), at(2 * k, 0)), 1));
                if k < n_i {
                    items.push((Segment::new(at(2 * k, 0), at(2 * k, -side)), 1));
                }
            }
            // One hook per block: a 5-edge path sharing exactly one
            // vertex with the zig-zag and dangling two odd tips.
            for i in 1..=n_i {
                let side = if i % 2 == 1 { 1 } else { -1 };
                items.push((Segment::new(at(2 * i, side), at(2 * i, 2 * side)), 1));
                items.push((Segment::new(at(2 * i, 2 * side), at(2 * i - 1, 2 * side)), 1));
                items.push((Segment::new(at(2 * i - 1, 2 * side), at(2 * i - 1, side)), 1));
                items.push((Segment::new(at(2 * i - 1, side), at(2 * i - 1, 0)), 1));
                items.push((Segment::new(at(2 * i - 1, 0), at(2 * i - 1, -side)), 1));
            }
            let total = rat_int(5 * n_i) + rat_int(6 * n_i) * delta;
            Ok(InsertionInstance {
                multiset: SegmentMultiset::new(false, items),
                total_length: total,
            })
        }
    }
}

/// A clause of a monotone rectilinear 3-SAT formula: three distinct
/// variables in increasing order, all appearing positively (`positive`)
/// or all negatively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clause {
    pub positive: bool,
    /// 1-based variable indices, strictly increasing.
    pub vars: [usize; 3],
}

impl Clause {
    pub fn pos(a: usize, b: usize, c: usize) -> Clause {
        Clause {
            positive: true,
            vars: [a, b, c],
        }
    }

    pub fn neg(a: usize, b: usize, c: usize) -> Clause {
        Clause {
            positive: false,
            vars: [a, b, c],
        }
    }

    fn interval(&self) -> (usize, usize) {
        (self.vars[0], self.vars[2])
    }
}

/// A monotone 3-SAT formula in rectilinear nested form: positive
/// clauses live above the variable line, negative clauses below, and
/// same-side clauses must be pairwise nested or disjoint by variable
/// interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneRectilinear3Sat {
    pub vars: usize,
    pub clauses: Vec<Clause>,
}

/// Validation failures for formulas and their gadget layouts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatError {
    NoVariables,
    BadClause {
        clause: usize,
        why: &'static str,
    },
    /// The two clauses cannot be drawn on one side without a crossing.
    NotRectilinearPlanar {
        a: usize,
        b: usize,
        why: &'static str,
    },
}

impl fmt::Display for SatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatError::NoVariables => write!(f, "formula has no variables"),
            SatError::BadClause { clause, why } => write!(f, "clause {clause}: {why}"),
            SatError::NotRectilinearPlanar { a, b, why } => {
                write!(f, "clauses {a} and {b}: {why}")
            }
        }
    }
}

impl std::error::Error for SatError {}

/// Checks clause well-formedness and the rectilinear nesting
/// conditions: same-side variable intervals must be pairwise nested or
/// disjoint, and an outer clause may not place a literal strictly
/// inside a nested clause's open interval (its leg would have to cross
/// the inner clause's body).
pub fn validate_sat(sat: &MonotoneRectilinear3Sat) -> Result<(), SatError> {
    if sat.vars == 0 {
        return Err(SatError::NoVariables);
    }
    for (i, c) in sat.clauses.iter().enumerate() {
        if c.vars[0] == 0 || c.vars[2] > sat.vars {
            return Err(SatError::BadClause {
                clause: i,
                why: "variable index out of range",
            });
        }
        if !(c.vars[0] < c.vars[1] && c.vars[1] < c.vars[2]) {
            return Err(SatError::BadClause {
                clause: i,
                why: "variables must be three distinct indices in increasing order",
            });
        }
    }
    for a in 0..sat.clauses.len() {
        for b in a + 1..sat.clauses.len() {
            let (ca, cb) = (&sat.clauses[a], &sat.clauses[b]);
            if ca.positive != cb.positive {
                continue;
            }
            let (la, ra) = ca.interval();
            let (lb, rb) = cb.interval();
            let disjoint = ra <= lb || rb <= la;
            let a_outer = la <= lb && rb <= ra;
            let b_outer = lb <= la && ra <= rb;
            if disjoint {
                continue;
            }
            if !a_outer && !b_outer {
                return Err(SatError::NotRectilinearPlanar {
                    a,
                    b,
                    why: "variable intervals interleave",
                });
            }
            let check_outer = |outer: &Clause, inner: &Clause| -> Result<(), SatError> {
                let (li, ri) = inner.interval();
                if outer.vars.iter().any(|&v| li < v && v < ri) {
                    Err(SatError::NotRectilinearPlanar {
                        a,
                        b,
                        why: "outer clause has a literal inside a nested clause's span",
                    })
                } else {
                    Ok(())
                }
            };
            if a_outer {
                check_outer(ca, cb)?;
            }
            if b_outer {
                check_outer(cb, ca)?;
            }
        }
    }
    Ok(())
}

/// True when the assignment (index 0 is variable 1) satisfies every
/// clause: a positive clause needs some true variable, a negative one
/// some false variable.
pub fn satisfies(sat: &MonotoneRectilinear3Sat, assignment: &[bool]) -> bool {
    assignment.len() == sat.vars
        && sat.clauses.iter().all(|c| {
            c.vars
                .iter()
                .any(|&v| assignment[v - 1] == c.positive)
        })
}

/// Errors from the exhaustive satisfiability oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteSatError {
    TooLarge { vars: usize },
}

impl fmt::Display for BruteSatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BruteSatError::TooLarge { vars } => {
                write!(f, "{vars} variables exceed the exhaustive-search cap of 24")
            }
        }
    }
}

impl std::error::Error for BruteSatError {}

/// Exhaustive satisfiability check, at most 24 variables. Returns the
/// first satisfying assignment in ascending bitmask order (bit `i` is
/// variable `i+1`), or `None` when the formula is unsatisfiable.
pub fn brute_sat(sat: &MonotoneRectilinear3Sat) -> Result<Option<Vec<bool>>, BruteSatError> {
    if sat.vars > 24 {
        return Err(BruteSatError::TooLarge { vars: sat.vars });
    }
    for mask in 0u64..(1u64 << sat.vars) {
        let assignment: Vec<bool> = (0..sat.vars).map(|i| mask >> i & 1 == 1).collect();
        if satisfies(sat, &assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

/// One literal occurrence: which clause and which of its three slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LitSlot {
    pub clause: usize,
    /// 0, 1, or 2, west to east within the clause.
    pub pos: usize,
}

/// Concrete clause geometry: `side` is +1 above the variable line and
/// -1 below; `corners` holds the six cycle corners `[A,B,C,D,E,F]`
/// where `A` sits over the west literal, `B,C` flank the middle
/// literal, `D` sits over the east literal, and `E,F` span the top.
#[derive(Debug, Clone)]
pub(crate) struct ClauseGeom {
    pub side: i64,
    pub lit_x: [Rational; 3],
    pub corners: [Point; 6],
}

/// Output of the formula-to-instance reduction: the segment multiset
/// plus the coordinates the certificate construction needs.
#[derive(Debug, Clone)]
pub struct SatReduction {
    pub multiset: SegmentMultiset,
    pub directed: bool,
    /// The variable-line vertices `v_0..=v_n`.
    pub variable_vertices: Vec<Point>,
    /// Per clause, its three literal vertices west to east (all on the
    /// variable line).
    pub literal_vertices: Vec<[Point; 3]>,
    pub(crate) sat: MonotoneRectilinear3Sat,
    /// Per variable, the literal stops along its connector path, west
    /// to east.
    pub(crate) chains: Vec<Vec<(Point, LitSlot)>>,
    pub(crate) clause_geoms: Vec<ClauseGeom>,
    /// Directed variant only: the two upper corners of the return
    /// path, east then west.
    pub(crate) top: Option<(Point, Point)>,
}

/// Same-side nesting depth of every clause (number of same-side
/// clauses whose interval strictly contains it).
fn clause_depths(sat: &MonotoneRectilinear3Sat) -> Vec<usize> {
    sat.clauses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (l, r) = c.interval();
            sat.clauses
                .iter()
                .enumerate()
                .filter(|(j, d)| {
                    *j != i && d.positive == c.positive && {
                        let (dl, dr) = d.interval();
                        dl <= l && r <= dr
                    }
                })
                .count()
        })
        .collect()
}

/// Reduces a valid formula to a segment multiset whose weakly simple
/// Euler tours correspond to satisfying assignments.
///
/// Geometry: variable vertices at `(0,0)..(n,0)`; each variable `i`
/// contributes one spine edge `v_{i-1}v_i` plus a connector path
/// through its literal vertices, which are equally spaced inside
/// `(i-1, i)` and ordered so that clause legs never cross (east-ending
/// clauses deepest-first, then the at-most-one middle occurrence, then
/// west-ending clauses shallowest-first; positive occurrences west of
/// negative ones). Clause gadgets are 9-edge cycles at heights that
/// respect nesting. The directed variant orients everything on the
/// variable line eastwards, each clause cycle consistently, and adds
/// four return segments (one collinear with the variable line, three
/// routed over the top).
pub fn reduce_to_wspr(
    sat: &MonotoneRectilinear3Sat,
    directed: bool,
) -> Result<SatReduction, SatError> {
    validate_sat(sat)?;
    let n = sat.vars;
    let depths = clause_depths(sat);

    // Gather occurrences per variable and order them west to east.
    let mut per_var: Vec<Vec<LitSlot>> = vec![Vec::new(); n + 1];
    for (ci, c) in sat.clauses.iter().enumerate() {
        for pos in 0..3 {
            per_var[c.vars[pos]].push(LitSlot { clause: ci, pos });
        }
    }
    for slots in per_var.iter_mut() {
        slots.sort_by(|s, t| {
            let key = |slot: &LitSlot| {
                let c = &sat.clauses[slot.clause];
                let side = if c.positive { 0usize } else { 1 };
                // East-ending occurrences first (deepest to
                // shallowest), then the middle occurrence, then
                // west-ending ones (shallowest to deepest).
                let (rank, depth_key) = match slot.pos {
                    2 => (0usize, usize::MAX - depths[slot.clause]),
                    1 => (1, 0),
                    _ => (2, depths[slot.clause]),
                };
                (side, rank, depth_key, slot.clause)
            };
            key(s).cmp(&key(t))
        });
    }

    // Spacing scale: literal vertices of variable i sit at
    // (i-1) + j/(p_i+1); margins derive from the tightest spacing.
    let p_max = per_var.iter().map(Vec::len).max().unwrap_or(0);
    let gap = rat(1, p_max as i64 + 1);
    let s_mid = &gap / rat_int(4);
    let s_top = &gap / rat_int(8);

    let variable_vertices: Vec<Point> = (0..=n as i64).map(|i| pt_int(i, 0)).collect();

    // Literal x-coordinates per clause slot.
    let mut lit_x: Vec<[Option<Rational>; 3]> = vec![[None, None, None]; sat.clauses.len()];
    let mut chains: Vec<Vec<(Point, LitSlot)>> = Vec::with_capacity(n);
    for (i, slots) in per_var.iter().enumerate().skip(1) {
        let m = slots.len() as i64;
        let mut chain = Vec::new();
        for (j, slot) in slots.iter().enumerate() {
            let x = rat_int(i as i64 - 1) + rat(j as i64 + 1, m + 1);
            lit_x[slot.clause][slot.pos] = Some(x.clone());
            chain.push((Point::new(x, rat_int(0)), *slot));
        }
        chains.push(chain);
    }

    let max_depth = |positive: bool| {
        sat.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.positive == positive)
            .map(|(i, _)| depths[i])
            .max()
    };
    let d_above = max_depth(true);
    let d_below = max_depth(false);

    let mut literal_vertices = Vec::with_capacity(sat.clauses.len());
    let mut clause_geoms = Vec::with_capacity(sat.clauses.len());
    for (ci, c) in sat.clauses.iter().enumerate() {
        let xs: [Rational; 3] = [
            lit_x[ci][0].clone().expect("slot was placed"),
            lit_x[ci][1].clone().expect("slot was placed"),
            lit_x[ci][2].clone().expect("slot was placed"),
        ];
        literal_vertices.push([
            Point::new(xs[0].clone(), rat_int(0)),
            Point::new(xs[1].clone(), rat_int(0)),
            Point::new(xs[2].clone(), rat_int(0)),
        ]);
        let side = if c.positive { 1i64 } else { -1 };
        let deepest = if c.positive { d_above } else { d_below }.expect("clause side occupied");
        let lift = (deepest - depths[ci]) as i64;
        let h = rat_int(side) * rat_int(1 + 2 * lift);
        let h2 = rat_int(side) * rat_int(2 + 2 * lift);
        let corners = [
            Point::new(xs[0].clone(), h.clone()),
            Point::new(&xs[1] - &s_mid, h.clone()),
            Point::new(&xs[1] + &s_mid, h.clone()),
            Point::new(xs[2].clone(), h.clone()),
            Point::new(&xs[2] + &s_top, h2.clone()),
            Point::new(&xs[0] - &s_top, h2),
        ];
        clause_geoms.push(ClauseGeom {
            side,
            lit_x: xs,
            corners,
        });
    }

    // Assemble the multiset: per variable the spine edge then the
    // connector path, then the clause cycles, then the directed
    // return segments. Directed instances orient the variable line
    // eastwards and each clause cycle l1->F->E->l3->D->C->l2->B->A->l1.
    let mut items: Vec<(Segment, u32)> = Vec::new();
    for i in 1..=n {
        items.push((
            Segment::new(
                variable_vertices[i - 1].clone(),
                variable_vertices[i].clone(),
            ),
            1,
        ));
        let mut prev = variable_vertices[i - 1].clone();
        for (p, _) in &chains[i - 1] {
            items.push((Segment::new(prev, p.clone()), 1));
            prev = p.clone();
        }
        items.push((Segment::new(prev, variable_vertices[i].clone()), 1));
    }
    for (ci, geom) in clause_geoms.iter().enumerate() {
        let [l1, l2, l3] = literal_vertices[ci].clone();
        let [a, b, c_pt, d, e, f] = geom.corners.clone();
        let cycle = [
            (l1.clone(), f.clone()),
            (f, e.clone()),
            (e, l3.clone()),
            (l3, d.clone()),
            (d, c_pt.clone()),
            (c_pt, l2.clone()),
            (l2, b.clone()),
            (b, a.clone()),
            (a, l1),
        ];
        for (from, to) in cycle {
            items.push((Segment::new(from, to), 1));
        }
    }
    let top = if directed {
        let height = rat_int(3 + 2 * d_above.unwrap_or(0) as i64);
        let east = Point::new(rat_int(n as i64), height.clone());
        let west = Point::new(rat_int(0), height);
        let v0 = variable_vertices[0].clone();
        let vn = variable_vertices[n].clone();
        items.push((Segment::new(vn.clone(), v0.clone()), 1));
        items.push((Segment::new(vn, east.clone()), 1));
        items.push((Segment::new(east.clone(), west.clone()), 1));
        items.push((Segment::new(west.clone(), v0), 1));
        Some((east, west))
    } else {
        None
    };

    Ok(SatReduction {
        multiset: SegmentMultiset::new(directed, items),
        directed,
        variable_vertices,
        literal_vertices,
        sat: sat.clone(),
        chains,
        clause_geoms,
        top,
    })
}

/// Errors from the assignment-to-certificate construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentError {
    WrongLength { expected: usize, got: usize },
    DoesNotSatisfy { clause: usize },
}

impl fmt::Display for AssignmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentError::WrongLength { expected, got } => {
                write!(f, "assignment has {got} values for {expected} variables")
            }
            AssignmentError::DoesNotSatisfy { clause } => {
                write!(f, "assignment does not satisfy clause {clause}")
            }
        }
    }
}

impl std::error::Error for AssignmentError {}

/// A position along the clause-cycle walk, excluding the merge literal
/// itself: either a cycle corner (index into `[A,B,C,D,E,F]`) or one of
/// the clause's other literal vertices (slot 0..3).
#[derive(Debug, Clone, Copy)]
enum Stop {
    Corner(usize),
    Lit(usize),
}

/// Interior stops of the clause walk when entering at literal slot `k`,
/// in the cycle's forward orientation.
fn clause_walk(k: usize) -> [Stop; 8] {
    use Stop::{Corner, Lit};
    match k {
        0 => [
            Corner(5),
            Corner(4),
            Lit(2),
            Corner(3),
            Corner(2),
            Lit(1),
            Corner(1),
            Corner(0),
        ],
        1 => [
            Corner(1),
            Corner(0),
            Lit(0),
            Corner(5),
            Corner(4),
            Lit(2),
            Corner(3),
            Corner(2),
        ],
        _ => [
            Corner(3),
            Corner(2),
            Lit(1),
            Corner(1),
            Corner(0),
            Lit(0),
            Corner(5),
            Corner(4),
        ],
    }
}

/// Builds the explicit weak-simplicity witness that a satisfying
/// assignment induces on a reduction instance.
///
/// The tour runs each variable gadget as two parallel strands: the
/// connector path of a true variable is drawn just above the line and
/// its spine edge just below (and vice versa for false variables), so
/// every positive clause finds a strand on its side at its merge
/// literal. Each clause is spliced into the tour at its westmost
/// true-valued literal; the other two literals get a shallow detour
/// strictly outside both strands. Undirected tours close with hairpin
/// turns past the two end vertices; directed tours close through the
/// four return edges, threading the collinear return segment between
/// the strands.
pub fn certificate_from_assignment(
    reduction: &SatReduction,
    assignment: &[bool],
) -> Result<(Tour, PerturbationCertificate), AssignmentError> {
    let sat = &reduction.sat;
    if assignment.len() != sat.vars {
        return Err(AssignmentError::WrongLength {
            expected: sat.vars,
            got: assignment.len(),
        });
    }
    // Merge slot per clause: westmost literal whose value is true.
    let mut merge = Vec::with_capacity(sat.clauses.len());
    for (ci, c) in sat.clauses.iter().enumerate() {
        let k = (0..3)
            .find(|&k| assignment[c.vars[k] - 1] == c.positive)
            .ok_or(AssignmentError::DoesNotSatisfy { clause: ci })?;
        merge.push(k);
    }

    let g = build_graph(&reduction.multiset).expect("reduction output is nondegenerate");
    let eps = choose_epsilon(&g).expect("reduction has at least two vertices");
    let e2 = &eps / rat_int(2);
    let e4 = &eps / rat_int(4);
    let e34 = rat(3, 4) * &eps;
    let n = sat.vars;

    // The walk pairs each tour vertex with its perturbed image.
    let mut walk: Vec<(Point, Point)> = Vec::new();
    let splice = |walk: &mut Vec<(Point, Point)>, ci: usize, forward: bool| {
        let geom = &reduction.clause_geoms[ci];
        let k = merge[ci];
        let level = rat_int(geom.side) * &e2;
        let x_m = &geom.lit_x[k];
        let lit = reduction.literal_vertices[ci][k].clone();
        let west = (lit.clone(), Point::new(x_m - &e4, level.clone()));
        let east = (lit, Point::new(x_m + &e4, level));
        let mut stops: Vec<(Point, Point)> = clause_walk(k)
            .iter()
            .map(|stop| match *stop {
                Stop::Corner(idx) => {
                    let orig = geom.corners[idx].clone();
                    // The two vertical legs shadow the shifted splice
                    // points when their literal is the entry.
                    let shift = match idx {
                        0 if k == 0 => e4.clone(),
                        3 if k == 2 => -e4.clone(),
                        _ => rat_int(0),
                    };
                    let pert = Point::new(&orig.x + shift, orig.y.clone());
                    (orig, pert)
                }
                Stop::Lit(slot) => {
                    let orig = reduction.literal_vertices[ci][slot].clone();
                    let pert = Point::new(orig.x.clone(), rat_int(geom.side) * &e34);
                    (orig, pert)
                }
            })
            .collect();
        if forward {
            walk.push(west);
            walk.append(&mut stops);
            walk.push(east);
        } else {
            walk.push(east);
            stops.reverse();
            walk.append(&mut stops);
            walk.push(west);
        }
    };
    // Emits the connector-path stops of variable i at the given level
    // (+1 or -1), splicing in any clause merged at one of its literals.
    let connector_pass = |walk: &mut Vec<(Point, Point)>, i: usize, level: i64, forward: bool| {
        let chain = &reduction.chains[i - 1];
        let order: Vec<&(Point, LitSlot)> = if forward {
            chain.iter().collect()
        } else {
            chain.iter().rev().collect()
        };
        for (p, slot) in order {
            if merge[slot.clause] == slot.pos {
                debug_assert_eq!(reduction.clause_geoms[slot.clause].side, level);
                splice(walk, slot.clause, forward);
            } else {
                walk.push((
                    p.clone(),
                    Point::new(p.x.clone(), rat_int(level) * &e2),
                ));
            }
        }
    };
    let junction = |i: usize, level: i64| {
        (
            reduction.variable_vertices[i].clone(),
            Point::new(rat_int(i as i64), rat_int(level) * &e2),
        )
    };

    let mut bends = Vec::new();
    if reduction.directed {
        let (top_east, top_west) = reduction.top.clone().expect("directed layout has a return");
        let v0 = reduction.variable_vertices[0].clone();
        let vn = reduction.variable_vertices[n].clone();
        // Upper strands west to east, then the collinear return
        // threaded between the strands, then the lower strands, then
        // up and over the top.
        walk.push((v0.clone(), Point::new(-&e2, e4.clone())));
        for i in 1..=n {
            if assignment[i - 1] {
                connector_pass(&mut walk, i, 1, true);
            }
            if i < n {
                walk.push(junction(i, 1));
            }
        }
        walk.push((vn.clone(), Point::new(rat_int(n as i64) + &e4, e4.clone())));
        walk.push((v0, Point::new(-&e4, -&e4)));
        for i in 1..=n {
            if !assignment[i - 1] {
                connector_pass(&mut walk, i, -1, true);
            }
            if i < n {
                walk.push(junction(i, -1));
            }
        }
        walk.push((vn, Point::new(rat_int(n as i64) + &e2, -&e4)));
        walk.push((
            top_east.clone(),
            Point::new(&top_east.x + &e2, &top_east.y + &e4),
        ));
        walk.push((
            top_west.clone(),
            Point::new(&top_west.x - &e2, &top_west.y + &e4),
        ));
    } else {
        // Upper strands west to east, hairpin past v_n, lower strands
        // east to west, hairpin past v_0.
        walk.push((
            reduction.variable_vertices[0].clone(),
            Point::new(-&e4, rat_int(0)),
        ));
        for i in 1..=n {
            if assignment[i - 1] {
                connector_pass(&mut walk, i, 1, true);
            }
            if i < n {
                walk.push(junction(i, 1));
            }
        }
        walk.push((
            reduction.variable_vertices[n].clone(),
            Point::new(rat_int(n as i64) + &e4, rat_int(0)),
        ));
        for i in (1..=n).rev() {
            if !assignment[i - 1] {
                connector_pass(&mut walk, i, -1, false);
            }
            if i > 1 {
                walk.push(junction(i - 1, -1));
            }
        }
        if walk.len() == 2 {
            // A single doubled spine edge: bend the upper copy so the
            // two-vertex circuit closes into a triangle.
            bends.push(BendPoint {
                after: 0,
                point: Point::new(rat(1, 2), e4.clone()),
            });
        }
    }

    let vid = |p: &Point| -> VertexId {
        VertexId(
            g.vertices
                .binary_search(p)
                .expect("walk vertices come from the reduction"),
        )
    };
    let tour = Tour::new(walk.iter().map(|(orig, _)| vid(orig)).collect());
    let certificate = PerturbationCertificate {
        tour: tour.clone(),
        eps,
        perturbed: walk.into_iter().map(|(_, pert)| pert).collect(),
        bends,
    };
    Ok((tour, certificate))
}

/// Errors from the exhaustive tour enumerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    TooLarge { edges: usize },
    NotEulerian,
}

impl fmt::Display for EnumerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerateError::TooLarge { edges } => {
                write!(f, "{edges} edges exceed the enumeration cap of 14")
            }
            EnumerateError::NotEulerian => write!(f, "graph is not Eulerian"),
        }
    }
}

impl std::error::Error for EnumerateError {}

/// Canonical form of a closed vertex sequence: the lexicographically
/// smallest rotation, also considering the reversed sequence for
/// undirected graphs (reversal flips edge directions, so it only
/// identifies tours of undirected graphs).
fn canonical_cycle(seq: &[usize], directed: bool) -> Vec<usize> {
    let m = seq.len();
    let mut best: Option<Vec<usize>> = None;
    let mut consider = |candidate: &[usize]| {
        for r in 0..m {
            let rotated: Vec<usize> = (0..m).map(|i| candidate[(r + i) % m]).collect();
            if best.as_ref().is_none_or(|b| rotated < *b) {
                best = Some(rotated);
            }
        }
    };
    consider(seq);
    if !directed {
        let reversed: Vec<usize> = seq.iter().rev().copied().collect();
        consider(&reversed);
    }
    best.expect("sequence is nonempty")
}

/// Enumerates every Euler tour of a small graph, deduplicated up to
/// rotation (and reflection for undirected graphs), in canonical
/// order. Stops early once `limit` distinct tours are found.
pub fn enumerate_euler_tours(
    g: &SegmentGraph,
    limit: usize,
) -> Result<Vec<Tour>, EnumerateError> {
    let m = g.edge_count();
    if m > 14 {
        return Err(EnumerateError::TooLarge { edges: m });
    }
    if !check_eulerian(g) {
        return Err(EnumerateError::NotEulerian);
    }
    let instances = g.edge_instances();
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); g.vertices.len()];
    for (i, &(u, v)) in instances.iter().enumerate() {
        incidence[u.0].push(i);
        if !g.directed {
            incidence[v.0].push(i);
        }
    }
    // Every tour visits vertex 0 (the graph is connected), so rooting
    // the search there loses no rotation class.
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut path: Vec<usize> = vec![0];
    let mut used: u32 = 0;
    fn dfs(
        g: &SegmentGraph,
        instances: &[(VertexId, VertexId)],
        incidence: &[Vec<usize>],
        path: &mut Vec<usize>,
        used: &mut u32,
        found: &mut BTreeSet<Vec<usize>>,
        limit: usize,
    ) {
        if found.len() >= limit {
            return;
        }
        let here = *path.last().expect("path starts rooted");
        if *used == (1u32 << instances.len()) - 1 {
            if here == path[0] {
                found.insert(canonical_cycle(&path[..path.len() - 1], g.directed));
            }
            return;
        }
        for &i in &incidence[here] {
            if *used >> i & 1 == 1 {
                continue;
            }
            let (a, b) = instances[i];
            let next = if a.0 == here { b.0 } else { a.0 };
            *used |= 1 << i;
            path.push(next);
            dfs(g, instances, incidence, path, used, found, limit);
            path.pop();
            *used &= !(1 << i);
        }
    }
    dfs(
        g,
        &instances,
        &incidence,
        &mut path,
        &mut used,
        &mut found,
        limit,
    );
    Ok(found
        .into_iter()
        .map(|seq| Tour::new(seq.into_iter().map(VertexId).collect()))
        .collect())
}

/// Samples `count` distinct integers from `lo..=hi` and returns them
/// ascending.
fn distinct_ints(rng: &mut impl Rng, lo: i64, hi: i64, count: usize) -> Vec<i64> {
    let mut set = BTreeSet::new();
    while set.len() < count {
        set.insert(rng.gen_range(lo..=hi));
    }
    set.into_iter().collect()
}

/// A "flower": loops fanned eastwards from a center, each the triangle
/// or fan of a disjoint vertical interval on the line `x = cx + reach`.
/// Returns the loop edges; `orient` receives the loop index and says
/// whether to emit that loop's cycle in reversed orientation.
fn flower_edges(
    rng: &mut impl Rng,
    center: (i64, i64),
    loops: usize,
    mut reversed: impl FnMut(usize) -> bool,
) -> Vec<Segment> {
    let (cx, cy) = center;
    let span = loops as i64 + 1;
    let reach = span + 1;
    let ys = distinct_ints(rng, -span, span, 2 * loops);
    let mut edges = Vec::new();
    for j in 0..loops {
        let (a, b) = (ys[2 * j], ys[2 * j + 1]);
        let mut cycle = vec![pt_int(cx, cy), pt_int(cx + reach, cy + a)];
        if b - a >= 2 && rng.gen_bool(0.4) {
            cycle.push(pt_int(cx + reach, cy + rng.gen_range(a + 1..b)));
        }
        cycle.push(pt_int(cx + reach, cy + b));
        if reversed(j) {
            cycle.reverse();
        }
        for w in 0..cycle.len() {
            edges.push(Segment::new(
                cycle[w].clone(),
                cycle[(w + 1) % cycle.len()].clone(),
            ));
        }
    }
    edges
}

/// Random undirected Eulerian simple geometric graph with 6 to 60
/// edges: a chain of flowers joined by two-segment "eyes" above and
/// below each link.
pub fn gen_random_eulerian_geometric(rng: &mut impl Rng) -> SegmentMultiset {
    let flowers = rng.gen_range(2..=4);
    let spacing = 4 * rng.gen_range(3..=5);
    let tx = rng.gen_range(-20..=20);
    let ty = rng.gen_range(-20..=20);
    let mut items = Vec::new();
    for f in 0..flowers {
        let center = (tx + f as i64 * spacing, ty);
        let loops = if f == 0 {
            rng.gen_range(1..=3)
        } else {
            rng.gen_range(0..=3)
        };
        for seg in flower_edges(rng, center, loops, |_| false) {
            items.push((seg, 1));
        }
        if f + 1 < flowers {
            let next = (center.0 + spacing, ty);
            for sign in [1i64, -1] {
                let mid = pt_int(center.0 + spacing / 2, ty + sign * spacing);
                items.push((Segment::new(pt_int(center.0, ty), mid.clone()), 1));
                items.push((Segment::new(mid, pt_int(next.0, ty)), 1));
            }
        }
    }
    SegmentMultiset::new(false, items)
}

/// Random directed Eulerian simple geometric graph in which one flower
/// loop runs against the others, so consecutive edge ends at the
/// center share a direction and no weakly simple Euler tour exists.
pub fn gen_alternation_violation(rng: &mut impl Rng) -> SegmentMultiset {
    let loops = rng.gen_range(2..=4);
    let flipped = rng.gen_range(0..loops);
    let center = (rng.gen_range(-20..=20), rng.gen_range(-20..=20));
    let items = flower_edges(rng, center, loops, |j| j == flipped)
        .into_iter()
        .map(|seg| (seg, 1))
        .collect();
    SegmentMultiset::new(true, items)
}

/// Random collinear Eulerian multigraph with at most 40 edges: a
/// closed walk over stations on a random carrier line.
pub fn gen_random_collinear(rng: &mut impl Rng) -> SegmentMultiset {
    let dirs: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (1, -1)];
    let (dx, dy) = dirs[rng.gen_range(0..dirs.len())];
    let (ox, oy) = (rng.gen_range(-10..=10), rng.gen_range(-10..=10));
    let station = |t: i64| pt_int(ox + t * dx, oy + t * dy);
    let count = rng.gen_range(3..=7);
    let ts = distinct_ints(rng, 0, 12, count);
    let steps = rng.gen_range(6..=20);
    let start = ts[rng.gen_range(0..ts.len())];
    let mut cur = start;
    let mut items = Vec::new();
    for _ in 0..steps - 1 {
        let mut next = cur;
        while next == cur {
            next = ts[rng.gen_range(0..ts.len())];
        }
        items.push((Segment::new(station(cur), station(next)), 1));
        cur = next;
    }
    if cur != start {
        items.push((Segment::new(station(cur), station(start)), 1));
    }
    SegmentMultiset::new(false, items)
}

/// Appends a closed walk over the given collinear stations, beginning
/// at `start`, and returns the set of visited station indices.
fn closed_walk(
    rng: &mut impl Rng,
    stations: &[Point],
    start: usize,
    steps: usize,
    items: &mut Vec<(Segment, u32)>,
) -> BTreeSet<usize> {
    let mut visited = BTreeSet::from([start]);
    let mut cur = start;
    for _ in 0..steps - 1 {
        let mut next = cur;
        while next == cur {
            next = rng.gen_range(0..stations.len());
        }
        items.push((Segment::new(stations[cur].clone(), stations[next].clone()), 1));
        visited.insert(next);
        cur = next;
    }
    if cur != start {
        items.push((Segment::new(stations[cur].clone(), stations[start].clone()), 1));
    }
    visited
}

/// Random connected even-degree noncrossing multiset with plentiful
/// overlaps and junctions, at most 40 edges: an overlapping closed
/// walk along a horizontal carrier, doubled vertical stubs rooted in
/// its interior, and optionally a collinear diagonal walk off one end.
pub fn gen_random_overlap_even(rng: &mut impl Rng) -> SegmentMultiset {
    let count = rng.gen_range(4..=6);
    let ts = distinct_ints(rng, 0, 8, count);
    let stations: Vec<Point> = ts.iter().map(|&t| pt_int(t, 0)).collect();
    let mut items = Vec::new();
    let steps = rng.gen_range(4..=12);
    let start = rng.gen_range(0..stations.len());
    let visited = closed_walk(rng, &stations, start, steps, &mut items);
    // The walk's coverage is the interval between its extreme visited
    // stations; everything else must anchor inside it.
    let lo = ts[*visited.first().expect("walk visits a station")];
    let hi = ts[*visited.last().expect("walk visits a station")];
    if lo < hi {
        for _ in 0..rng.gen_range(1..=4) {
            let x = rat_int(rng.gen_range(lo..hi)) + rat(1, 2);
            let height = rng.gen_range(1..=2);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let base = Point::new(x.clone(), rat_int(0));
            let tip = Point::new(x, rat_int(sign * height));
            items.push((Segment::new(base, tip), 2));
        }
    }
    // Tail walks must begin at station 0, the point they share with the
    // carrier, or they would float free of the rest of the support.
    if rng.gen_bool(0.5) {
        let tail: Vec<Point> = (0..4).map(|t| pt_int(hi + t, t)).collect();
        let steps = rng.gen_range(2..=5);
        closed_walk(rng, &tail, 0, steps, &mut items);
    }
    if rng.gen_bool(0.5) {
        let tail: Vec<Point> = (0..4).map(|t| pt_int(lo - t, -t)).collect();
        let steps = rng.gen_range(2..=5);
        closed_walk(rng, &tail, 0, steps, &mut items);
    }
    SegmentMultiset::new(false, items)
}

/// Random connected noncrossing multigraph (degrees unconstrained)
/// with at most 40 edge copies, built from the same palette as
/// [`gen_random_overlap_even`] but with open walks, single stubs, and
/// random multiplicities.
pub fn gen_random_multigraph(rng: &mut impl Rng) -> SegmentMultiset {
    let count = rng.gen_range(4..=6);
    let ts = distinct_ints(rng, 0, 8, count);
    let mut items = Vec::new();
    // Open overlapping walk along the carrier.
    let mut cur = 0usize;
    let mut visited = BTreeSet::from([cur]);
    for _ in 0..rng.gen_range(3..=10) {
        let mut next = cur;
        while next == cur {
            next = rng.gen_range(0..ts.len());
        }
        let mult = rng.gen_range(1..=2);
        items.push((Segment::new(pt_int(ts[cur], 0), pt_int(ts[next], 0)), mult));
        visited.insert(next);
        cur = next;
    }
    let lo = ts[*visited.first().expect("walk visits a station")];
    let hi = ts[*visited.last().expect("walk visits a station")];
    if lo < hi {
        for _ in 0..rng.gen_range(0..=4) {
            let x = rat_int(rng.gen_range(lo..hi)) + rat(1, 2);
            let height = rng.gen_range(1..=2);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let base = Point::new(x.clone(), rat_int(0));
            let tip = Point::new(x, rat_int(sign * height));
            items.push((Segment::new(base, tip), rng.gen_range(1..=2)));
        }
    }
    if rng.gen_bool(0.4) {
        let mut curt = 0i64;
        for _ in 0..rng.gen_range(1..=4) {
            let mut next = curt;
            while next == curt {
                next = rng.gen_range(0..=3);
            }
            items.push((
                Segment::new(pt_int(hi + curt, curt), pt_int(hi + next, next)),
                1,
            ));
            curt = next;
        }
    }
    SegmentMultiset::new(false, items)
}

/// A deterministic corpus of small named graphs used by the
/// enumeration and screening audits.
pub fn small_graph_corpus() -> Vec<(&'static str, SegmentMultiset)> {
    let square = vec![
        (seg_int(0, 0, 2, 0), 1),
        (seg_int(2, 0, 2, 2), 1),
        (seg_int(2, 2, 0, 2), 1),
        (seg_int(0, 2, 0, 0), 1),
    ];
    let triangle = vec![
        (seg_int(0, 0, 3, 0), 1),
        (seg_int(3, 0, 0, 3), 1),
        (seg_int(0, 3, 0, 0), 1),
    ];
    let figure_eight = vec![
        (seg_int(0, 0, -2, 1), 1),
        (seg_int(-2, 1, -2, -1), 1),
        (seg_int(-2, -1, 0, 0), 1),
        (seg_int(0, 0, 2, 1), 1),
        (seg_int(2, 1, 2, -1), 1),
        (seg_int(2, -1, 0, 0), 1),
    ];
    let doubled_chain = vec![(seg_int(0, 0, 1, 0), 2), (seg_int(1, 0, 2, 0), 2)];
    let odd_bundle = vec![
        (seg_int(0, 0, 2, 0), 2),
        (seg_int(0, 0, 1, 0), 1),
        (seg_int(1, 0, 2, 0), 1),
    ];
    let two_squares = vec![
        (seg_int(0, 0, 2, 0), 1),
        (seg_int(2, 0, 2, 2), 1),
        (seg_int(2, 2, 0, 2), 1),
        (seg_int(0, 2, 0, 0), 1),
        (seg_int(2, 0, 4, 0), 1),
        (seg_int(4, 0, 4, 2), 1),
        (seg_int(4, 2, 2, 2), 1),
        (seg_int(2, 2, 2, 0), 1),
    ];
    let directed_square = vec![
        (seg_int(0, 0, 2, 0), 1),
        (seg_int(2, 0, 2, 2), 1),
        (seg_int(2, 2, 0, 2), 1),
        (seg_int(0, 2, 0, 0), 1),
    ];
    let directed_eight = vec![
        (seg_int(0, 0, -2, 1), 1),
        (seg_int(-2, 1, -2, -1), 1),
        (seg_int(-2, -1, 0, 0), 1),
        (seg_int(0, 0, 2, 1), 1),
        (seg_int(2, 1, 2, -1), 1),
        (seg_int(2, -1, 0, 0), 1),
    ];
    vec![
        ("square", SegmentMultiset::new(false, square)),
        ("triangle", SegmentMultiset::new(false, triangle)),
        ("figure-eight", SegmentMultiset::new(false, figure_eight)),
        ("doubled-chain", SegmentMultiset::new(false, doubled_chain)),
        ("odd-bundle", SegmentMultiset::new(false, odd_bundle)),
        ("two-squares", SegmentMultiset::new(false, two_squares)),
        ("directed-square", SegmentMultiset::new(true, directed_square)),
        ("directed-eight", SegmentMultiset::new(true, directed_eight)),
    ]
}

/// A deterministic corpus of valid formulas (at most 6 variables and 4
/// clauses) exercising nesting, sharing, and both sides.
pub fn sat_corpus() -> Vec<MonotoneRectilinear3Sat> {
    let f = |vars: usize, clauses: Vec<Clause>| MonotoneRectilinear3Sat { vars, clauses };
    vec![
        f(1, vec![]),
        f(3, vec![Clause::pos(1, 2, 3)]),
        f(3, vec![Clause::neg(1, 2, 3)]),
        f(3, vec![Clause::pos(1, 2, 3), Clause::neg(1, 2, 3)]),
        f(5, vec![Clause::pos(1, 2, 5), Clause::pos(2, 3, 4)]),
        f(6, vec![Clause::pos(1, 2, 3), Clause::pos(4, 5, 6)]),
        f(5, vec![Clause::pos(1, 2, 3), Clause::pos(3, 4, 5)]),
        f(
            6,
            vec![
                Clause::pos(1, 2, 6),
                Clause::pos(3, 4, 6),
                Clause::pos(4, 5, 6),
                Clause::neg(1, 2, 3),
            ],
        ),
        f(4, vec![Clause::pos(1, 3, 4), Clause::pos(1, 2, 3)]),
        f(
            5,
            vec![
                Clause::pos(2, 3, 4),
                Clause::pos(1, 2, 5),
                Clause::neg(2, 3, 4),
                Clause::neg(1, 4, 5),
            ],
        ),
        f(4, vec![Clause::pos(1, 2, 4)]),
        f(5, vec![Clause::pos(1, 2, 3), Clause::pos(1, 4, 5)]),
        f(6, vec![Clause::pos(1, 3, 6), Clause::pos(1, 2, 3), Clause::neg(2, 4, 6)]),
    ]
}

//! Exact planar primitives: rational points, segments, orientation tests,
//! and pairwise segment classification.
//!
//! Every predicate in this module is computed over arbitrary-precision
//! rationals, so classifications are exact and all distance comparisons
//! are done on *squared* distances (which stay rational).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact scalar type used throughout the crate.
pub type Rational = BigRational;

/// Convenience constructor for a rational from an integer pair.
///
/// Panics if `den == 0`; intended for literals in code and tests.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for an integer-valued rational.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Error raised by [`parse_rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    /// The token was empty or contained unexpected characters.
    Malformed(String),
    /// The denominator was zero or negative (denominators must be plain
    /// positive digit strings; the sign belongs on the numerator).
    BadDenominator(String),
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Malformed(tok) => {
                write!(f, "malformed rational token {tok:?}")
            }
            ParseRationalError::BadDenominator(tok) => {
                write!(f, "rational token {tok:?} must have a positive denominator")
            }
        }
    }
}

impl std::error::Error for ParseRationalError {}

fn parse_digits(tok: &str, part: &str) -> Result<BigInt, ParseRationalError> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(tok.to_string()));
    }
    BigInt::from_str(part).map_err(|_| ParseRationalError::Malformed(tok.to_string()))
}

/// Parses `p`, `-p`, `p/q`, or `-p/q` where `p` and `q` are digit strings
/// and `q > 0`.  No whitespace, decimals, or exponents are accepted.
pub fn parse_rational(tok: &str) -> Result<Rational, ParseRationalError> {
    let (sign, rest) = match tok.as_bytes().first() {
        Some(b'-') => (-1, &tok[1..]),
        Some(b'+') => (1, &tok[1..]),
        _ => (1, tok),
    };
    let (num_part, den) = match rest.split_once('/') {
        Some((n, d)) => {
            let den = parse_digits(tok, d)?;
            if den.is_zero() {
                return Err(ParseRationalError::BadDenominator(tok.to_string()));
            }
            (n, den)
        }
        None => (rest, BigInt::one()),
    };
    let num = parse_digits(tok, num_part)?;
    Ok(Rational::new(BigInt::from(sign) * num, den))
}

/// Formats a rational in the same canonical shape accepted by
/// [`parse_rational`]: the reduced fraction `p/q` with `q > 0`, or a bare
/// integer when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A point in the plane with exact rational coordinates.
///
/// The derived ordering is lexicographic (by `x`, then `y`), which the
/// rest of the crate relies on for canonical, deterministic sorting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Integer-coordinate shorthand, mostly for tests and generators.
    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(rat_int(x), rat_int(y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

/// A segment given by its two endpoints.  The endpoint order is
/// meaningful for directed inputs; undirected code paths compare via
/// [`Segment::canonical`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    /// True when both endpoints coincide.  Degenerate segments are
    /// rejected at input validation; geometry predicates assume
    /// non-degeneracy unless stated otherwise.
    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// The same segment with endpoints in lexicographic order, used as
    /// the identity of an undirected segment.
    pub fn canonical(&self) -> Segment {
        if self.a <= self.b {
            self.clone()
        } else {
            self.reversed()
        }
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.b.clone(), self.a.clone())
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.a, self.b)
    }
}

/// Sign of the signed area of the triangle `o`, `a`, `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Cross product of the vectors `o -> a` and `o -> b`.
pub fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

/// Dot product of the vectors `o -> a` and `o -> b`.
pub fn dot(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.x - &o.x) * (&b.x - &o.x) + (&a.y - &o.y) * (&b.y - &o.y)
}

pub fn orientation(o: &Point, a: &Point, b: &Point) -> Orientation {
    let c = cross(o, a, b);
    if c.is_zero() {
        Orientation::Collinear
    } else if c.is_positive() {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

/// Squared Euclidean distance between two points.
pub fn squared_distance(p: &Point, q: &Point) -> Rational {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &dx * &dx + &dy * &dy
}

/// True when `p` lies on the closed segment `s` (endpoints included).
pub fn point_on_segment(p: &Point, s: &Segment) -> bool {
    if orientation(&s.a, &s.b, p) != Orientation::Collinear {
        return false;
    }
    within_closed_box(p, s)
}

/// True when `p` lies strictly inside `s` (collinear, not an endpoint).
pub fn point_in_segment_interior(p: &Point, s: &Segment) -> bool {
    point_on_segment(p, s) && *p != s.a && *p != s.b
}

fn within_closed_box(p: &Point, s: &Segment) -> bool {
    let (xmin, xmax) = minmax(&s.a.x, &s.b.x);
    let (ymin, ymax) = minmax(&s.a.y, &s.b.y);
    *xmin <= p.x && p.x <= *xmax && *ymin <= p.y && p.y <= *ymax
}

fn minmax<'a>(a: &'a Rational, b: &'a Rational) -> (&'a Rational, &'a Rational) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Squared distance from `p` to the closed segment `s`.
pub fn point_segment_distance2(p: &Point, s: &Segment) -> Rational {
    let len2 = squared_distance(&s.a, &s.b);
    if len2.is_zero() {
        return squared_distance(p, &s.a);
    }
    let t = dot(&s.a, &s.b, p) / &len2;
    let t = if t < Rational::zero() {
        Rational::zero()
    } else if t > Rational::one() {
        Rational::one()
    } else {
        t
    };
    let nearest = Point::new(&s.a.x + &t * (&s.b.x - &s.a.x), &s.a.y + &t * (&s.b.y - &s.a.y));
    squared_distance(p, &nearest)
}

/// How two non-degenerate segments relate to each other.
///
/// The classes are mutually exclusive; collinear positive-length
/// intersection wins over every other class, and a shared endpoint wins
/// over the point-on-interior and crossing classes (a pair touching only
/// at a common endpoint cannot also cross).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    /// The closed segments do not intersect at all.
    Disjoint,
    /// The segments touch in exactly one point which is an endpoint of
    /// both.
    SharedEndpoint,
    /// The segments touch in exactly one point which is an endpoint of
    /// one and interior to the other.
    EndpointOnInterior,
    /// The segments cross in exactly one point interior to both.
    Crossing,
    /// The segments are collinear and share a sub-segment of positive
    /// length.
    Overlap,
}

/// Classifies the interaction of two non-degenerate segments.
pub fn classify_pair(s: &Segment, t: &Segment) -> PairClass {
    let o_tc = orientation(&s.a, &s.b, &t.a);
    let o_td = orientation(&s.a, &s.b, &t.b);
    if o_tc == Orientation::Collinear && o_td == Orientation::Collinear {
        return classify_collinear(s, t);
    }

    if s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b {
        return PairClass::SharedEndpoint;
    }

    if point_in_segment_interior(&t.a, s)
        || point_in_segment_interior(&t.b, s)
        || point_in_segment_interior(&s.a, t)
        || point_in_segment_interior(&s.b, t)
    {
        return PairClass::EndpointOnInterior;
    }

    let o_sa = orientation(&t.a, &t.b, &s.a);
    let o_sb = orientation(&t.a, &t.b, &s.b);
    let opposite = |u: Orientation, v: Orientation| {
        matches!(
            (u, v),
            (Orientation::Clockwise, Orientation::CounterClockwise)
                | (Orientation::CounterClockwise, Orientation::Clockwise)
        )
    };
    if opposite(o_tc, o_td) && opposite(o_sa, o_sb) {
        return PairClass::Crossing;
    }
    PairClass::Disjoint
}

/// Classification for two segments already known to lie on one line.
fn classify_collinear(s: &Segment, t: &Segment) -> PairClass {
    // Order both segments along the common line by the lexicographic
    // order of their endpoints; on a fixed line that order is a linear
    // order along the line itself.
    let (s_lo, s_hi) = lex_sorted(&s.a, &s.b);
    let (t_lo, t_hi) = lex_sorted(&t.a, &t.b);
    // Intersection of the two closed parameter ranges.
    let lo = if s_lo >= t_lo { s_lo } else { t_lo };
    let hi = if s_hi <= t_hi { s_hi } else { t_hi };
    if lo > hi {
        PairClass::Disjoint
    } else if lo == hi {
        // A single shared point; on a common line it is necessarily the
        // upper endpoint of one segment and the lower endpoint of the
        // other, hence an endpoint of both.
        PairClass::SharedEndpoint
    } else {
        PairClass::Overlap
    }
}

fn lex_sorted<'a>(a: &'a Point, b: &'a Point) -> (&'a Point, &'a Point) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Largest power of two `s` with `s^2 * len2 < target2` (both arguments
/// must be positive).
///
/// This is the crate's standard way of picking an exact rational scale
/// for a displacement along an unnormalized vector `d` with `|d|^2 =
/// len2`: the scaled vector `s * d` has Euclidean length strictly below
/// `sqrt(target2)` but at least half of it, without ever leaving the
/// rationals.
pub fn pow2_scale(len2: &Rational, target2: &Rational) -> Rational {
    assert!(len2.is_positive() && target2.is_positive());
    let mut s = Rational::one();
    let fits = |s: &Rational| -> bool { s * s * len2 < *target2 };
    if fits(&s) {
        loop {
            let next = &s * rat_int(2);
            if fits(&next) {
                s = next;
            } else {
                break;
            }
        }
    } else {
        while !fits(&s) {
            s /= rat_int(2);
        }
    }
    s
}

/// Largest power of two `eps` with `64 * eps^2` strictly below `d2_min`.
///
/// Perturbations bounded by such an `eps` keep every vertex disk well
/// separated from every other vertex and from every non-incident
/// segment, which is what the certificate constructions rely on.
pub fn eps_below(d2_min: &Rational) -> Rational {
    pow2_scale(&rat_int(64), d2_min)
}

/// Exact square root of a nonnegative rational, when it is rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
        Some(Rational::new(num, den))
    } else {
        None
    }
}

/// [`eps_below`] applied to the minimum squared distance between
/// distinct points of the input. Returns `None` when fewer than two
/// distinct points are present.
pub fn choose_epsilon(points: &[Point]) -> Option<Rational> {
    let mut d2_min: Option<Rational> = None;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            if p == q {
                continue;
            }
            let d2 = squared_distance(p, q);
            if d2_min.as_ref().is_none_or(|m| d2 < *m) {
                d2_min = Some(d2);
            }
        }
    }
    Some(eps_below(&d2_min?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(ax: i64, ay: i64, bx: i64, by: i64) -> Segment {
        Segment::new(pt(ax, ay), pt(bx, by))
    }

    #[test]
    fn parse_and_format_round_trip() {
        for tok in ["3", "-3", "0", "7/2", "-7/2", "1000000000000000000000/7"] {
            let r = parse_rational(tok).unwrap();
            assert_eq!(format_rational(&r), tok);
        }
        // Non-canonical inputs parse but re-format reduced.
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("+5").unwrap()), "5");
        assert_eq!(format_rational(&parse_rational("-0").unwrap()), "0");
        assert_eq!(format_rational(&parse_rational("006/004").unwrap()), "3/2");
    }

    #[test]
    fn parse_rejects_malformed_tokens() {
        for tok in [
            "", "+", "-", "/", "1/", "/2", "1/2/3", "1.5", "1e3", " 1", "1 ", "--1", "+-1",
            "1/+2", "a", "0x10",
        ] {
            assert!(parse_rational(tok).is_err(), "accepted {tok:?}");
        }
        assert_eq!(
            parse_rational("3/0"),
            Err(ParseRationalError::BadDenominator("3/0".into()))
        );
        assert!(matches!(parse_rational("3/-7"), Err(ParseRationalError::Malformed(_))));
    }

    #[test]
    fn orientation_signs() {
        assert_eq!(
            orientation(&pt(0, 0), &pt(1, 0), &pt(0, 1)),
            Orientation::CounterClockwise
        );
        assert_eq!(orientation(&pt(0, 0), &pt(0, 1), &pt(1, 0)), Orientation::Clockwise);
        assert_eq!(orientation(&pt(0, 0), &pt(1, 1), &pt(2, 2)), Orientation::Collinear);
    }

    #[test]
    fn point_segment_membership() {
        let s = seg(0, 0, 2, 0);
        assert!(point_on_segment(&pt(1, 0), &s));
        assert!(point_on_segment(&pt(0, 0), &s));
        assert!(point_in_segment_interior(&pt(1, 0), &s));
        assert!(!point_in_segment_interior(&pt(2, 0), &s));
        assert!(!point_on_segment(&pt(3, 0), &s));
        assert!(!point_on_segment(&pt(1, 1), &s));
        // Vertical segment exercises the box check on the y axis.
        let v = seg(0, 0, 0, 2);
        assert!(point_on_segment(&pt(0, 1), &v));
        assert!(!point_on_segment(&pt(0, 3), &v));
    }

    #[test]
    fn classify_pair_all_classes() {
        use PairClass::*;
        // Disjoint, both in general position and collinear.
        assert_eq!(classify_pair(&seg(0, 0, 1, 0), &seg(0, 1, 1, 1)), Disjoint);
        assert_eq!(classify_pair(&seg(0, 0, 1, 0), &seg(2, 0, 3, 0)), Disjoint);
        // A near miss: endpoint close to, but not on, the other segment.
        assert_eq!(classify_pair(&seg(0, 0, 2, 0), &seg(1, 1, 1, 2)), Disjoint);

        // Shared endpoints, angled and collinear.
        assert_eq!(classify_pair(&seg(0, 0, 1, 0), &seg(1, 0, 1, 1)), SharedEndpoint);
        assert_eq!(classify_pair(&seg(0, 0, 1, 0), &seg(1, 0, 2, 0)), SharedEndpoint);
        assert_eq!(classify_pair(&seg(1, 0, 0, 0), &seg(2, 0, 1, 0)), SharedEndpoint);

        // T junction.
        assert_eq!(classify_pair(&seg(0, 0, 2, 0), &seg(1, 0, 1, 1)), EndpointOnInterior);
        assert_eq!(classify_pair(&seg(1, 0, 1, 1), &seg(0, 0, 2, 0)), EndpointOnInterior);

        // Proper crossings, including one at a non-integer point.
        assert_eq!(classify_pair(&seg(0, 0, 2, 2), &seg(0, 2, 2, 0)), Crossing);
        assert_eq!(classify_pair(&seg(0, 0, 1, 1), &seg(0, 1, 1, 0)), Crossing);

        // Overlaps: partial, nested, identical, and anchored at a shared
        // endpoint (positive-length collinear intersection wins).
        assert_eq!(classify_pair(&seg(0, 0, 2, 0), &seg(1, 0, 3, 0)), Overlap);
        assert_eq!(classify_pair(&seg(0, 0, 3, 0), &seg(1, 0, 2, 0)), Overlap);
        assert_eq!(classify_pair(&seg(0, 0, 1, 0), &seg(0, 0, 1, 0)), Overlap);
        assert_eq!(classify_pair(&seg(0, 0, 1, 0), &seg(1, 0, 0, 0)), Overlap);
        assert_eq!(classify_pair(&seg(0, 0, 2, 0), &seg(0, 0, 1, 0)), Overlap);
        // Collinear on a vertical line.
        assert_eq!(classify_pair(&seg(0, 0, 0, 2), &seg(0, 1, 0, 3)), Overlap);
    }

    #[test]
    fn classify_pair_is_symmetric() {
        let cases = [
            (seg(0, 0, 1, 0), seg(0, 1, 1, 1)),
            (seg(0, 0, 1, 0), seg(1, 0, 1, 1)),
            (seg(0, 0, 2, 0), seg(1, 0, 1, 1)),
            (seg(0, 0, 2, 2), seg(0, 2, 2, 0)),
            (seg(0, 0, 2, 0), seg(1, 0, 3, 0)),
        ];
        for (s, t) in cases {
            assert_eq!(classify_pair(&s, &t), classify_pair(&t, &s));
        }
    }

    #[test]
    fn point_segment_distance2_cases() {
        let s = seg(-1, 0, 1, 0);
        assert_eq!(point_segment_distance2(&pt(0, 1), &s), rat_int(1));
        assert_eq!(point_segment_distance2(&pt(2, 1), &s), rat_int(2));
        assert_eq!(point_segment_distance2(&pt(0, 0), &s), rat_int(0));
        assert_eq!(point_segment_distance2(&pt(-3, 0), &s), rat_int(4));
        // Projection at a non-integer parameter.
        let d = seg(0, 0, 2, 2);
        assert_eq!(point_segment_distance2(&pt(1, 0), &d), rat(1, 2));
    }

    #[test]
    fn epsilon_is_a_safe_power_of_two() {
        // Unit square: minimum squared distance 1.
        let square = vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)];
        assert_eq!(choose_epsilon(&square), Some(rat(1, 16)));
        // Two points at distance 1/3.
        let close = vec![pt(0, 0), Point::new(rat(1, 3), rat_int(0))];
        assert_eq!(choose_epsilon(&close), Some(rat(1, 32)));
        // Far apart points allow eps above one.
        let far = vec![pt(0, 0), pt(100, 0)];
        assert_eq!(choose_epsilon(&far), Some(rat_int(8)));
        // Degenerate inputs.
        assert_eq!(choose_epsilon(&[pt(0, 0)]), None);
        assert_eq!(choose_epsilon(&[pt(0, 0), pt(0, 0)]), None);
    }

    #[test]
    fn pow2_scale_bounds_are_strict() {
        // len2 = 4 (vector of length 2), target 1: s = 1/2 gives exactly
        // 1, which fails the strict bound, so s = 1/4.
        assert_eq!(pow2_scale(&rat_int(4), &rat_int(1)), rat(1, 4));
        // len2 = 2, target2 = 9: s = 2 gives 8 < 9; s = 4 gives 32.
        assert_eq!(pow2_scale(&rat_int(2), &rat_int(9)), rat_int(2));
        assert_eq!(eps_below(&rat_int(1)), rat(1, 16));
        assert_eq!(eps_below(&rat(1, 9)), rat(1, 32));
    }

    #[test]
    fn rational_sqrt_exact_only() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat_int(0)), Some(rat_int(0)));
        assert_eq!(rational_sqrt(&rat_int(2)), None);
        assert_eq!(rational_sqrt(&rat(4, 3)), None);
        assert_eq!(rational_sqrt(&rat_int(-4)), None);
    }
}

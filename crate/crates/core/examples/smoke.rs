//! End-to-end smoke drive: solve two instances and check the resulting
//! certificates with the independent exact verifier.
//!
//! Run with `cargo run -p wspkit-core --example smoke`.

use wspkit_core::certify::verify_certificate;
use wspkit_core::embedding::solve_star;
use wspkit_core::geom::{format_rational, rat_int, Point, Segment};
use wspkit_core::graph::{build_graph, SegmentMultiset};
use wspkit_core::plus::solve_plus;
use wspkit_core::tour::{certificate_from_tour, weakly_simple_tour};

fn pt(x: i64, y: i64) -> Point {
    Point::new(rat_int(x), rat_int(y))
}

fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
    Segment::new(pt(a.0, a.1), pt(b.0, b.1))
}

fn main() {
    // 1. A simple geometric graph: unit square, one copy per side.
    let square = SegmentMultiset::new(
        false,
        vec![
            (seg((0, 0), (1, 0)), 1),
            (seg((1, 0), (1, 1)), 1),
            (seg((1, 1), (0, 1)), 1),
            (seg((0, 1), (0, 0)), 1),
        ],
    );
    let g = build_graph(&square).expect("square builds");
    let tour = weakly_simple_tour(&g).expect("square has a weakly simple tour");
    let cert = certificate_from_tour(&g, &tour).expect("certificate construction");
    verify_certificate(&g, &cert).expect("certificate verifies");
    println!(
        "square: tour of {} steps, eps = {}",
        tour.len(),
        format_rational(&cert.eps)
    );

    // 2. A multiset needing subdivision: a doubled bar with a T-stub.
    let tee = SegmentMultiset::new(
        false,
        vec![
            (seg((0, 0), (4, 0)), 2),
            (seg((2, 0), (2, 2)), 2),
        ],
    );
    let sol = solve_star(&tee).expect("tee solves");
    verify_certificate(&sol.outcome.gstar, &sol.certificate).expect("certificate verifies");
    println!(
        "tee: {} subdivision cuts, tour of {} steps, eps = {}",
        sol.outcome.plan.cuts.values().map(Vec::len).sum::<usize>(),
        sol.tour.len(),
        format_rational(&sol.certificate.eps)
    );

    // 3. A multiset needing insertion: an odd-degree L-stroke.
    let ell = SegmentMultiset::new(
        false,
        vec![(seg((0, 0), (4, 0)), 1), (seg((0, 0), (0, 3)), 1)],
    );
    let sol = solve_plus(&ell).expect("ell solves");
    verify_certificate(sol.outcome.gplus(), &sol.certificate).expect("certificate verifies");
    println!(
        "ell: {} inserted copies, tour of {} steps, eps = {}",
        sol.outcome.added.iter().map(|(_, m)| *m as usize).sum::<usize>(),
        sol.tour.len(),
        format_rational(&sol.certificate.eps)
    );

    println!("smoke: ok");
}

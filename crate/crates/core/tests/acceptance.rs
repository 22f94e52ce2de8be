//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use common::checks::*;
use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use unitree::arith::cusp::finite_order_census;
use unitree::arith::SubgroupSpec;
use unitree::homology::{abelianization, check_homology, cusp_pieces, graph_of_groups};
use unitree::ideal::{class_group, curve_point_count, BIdeal, QuotRing};
use unitree::local::{build_ball, Vertex};
use unitree::quotient::cusps::detect_cusp_rays;
use unitree::quotient::euler::euler_report;
use unitree::quotient::{congruence_image, label_ball, quotient_ball, quotient_from_labels, GammaOrbits};
use unitree::unitary::{boundary_act, boundary_line, fixed_boundary_point, line_act, mk_guv, mk_ua, BPoint, UMatrix};
use unitree::*;

type Outcome = std::result::Result<String, String>;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Check) -> std::result::Result<(), String> {
    runner(cases).run(&s, f).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn j_omega(e: &Ext, k: u32) -> BIdeal {
    BIdeal::new(e, vec![EllElem::omega()]).unwrap().pow(e, k).unwrap()
}

fn algebra() -> Outcome {
    const N: u32 = 10_000;
    let ctx = 0usize..4;
    run(N, (ctx.clone(), any::<u16>(), any::<u16>(), any::<u16>()), |(c, a, b, d)| fq_axioms(&contexts()[c], a, b, d))?;
    run(N, (ctx.clone(), raw_ell(), raw_ell(), raw_ell()), |(c, x, y, z)| ell_axioms(&contexts()[c], &x, &y, &z))?;
    run(N, (ctx.clone(), raw_ell(), raw_ell()), |(c, x, y)| conj_norm_trace(&contexts()[c], &x, &y))?;
    run(N, (ctx.clone(), raw_ell(), raw_ell()), |(c, x, y)| valuation_axioms(&contexts()[c], &x, &y))?;
    let pairs = (ctx, raw_ell(), raw_rat(), raw_ell(), raw_rat());
    run(N, pairs.clone(), |(c, u, b, x, d)| ua_group_law(&contexts()[c], &u, &b, &x, &d))?;
    run(N, pairs, |(c, u, b, x, d)| ua_commutator(&contexts()[c], &u, &b, &x, &d))?;
    Ok(format!("6 suites x {N} cases"))
}

fn unitary() -> Outcome {
    const N: u32 = 1_000;
    let ctx = 0usize..4;
    let word = || prop::collection::vec(raw_gen(), 1..4);
    run(N, (ctx.clone(), raw_gen()), |(c, g)| constructor_unitary(&contexts()[c], &g))?;
    run(N, (ctx.clone(), prop::collection::vec(raw_gen(), 1..5)), |(c, g)| bruhat_recomposes(&contexts()[c], &g))?;
    run(N, (ctx.clone(), word(), word(), raw_point()), |(c, g, h, xi)| boundary_action_law(&contexts()[c], &g, &h, &xi))?;
    run(N, (ctx, word(), raw_point()), |(c, g, xi)| line_equivariance(&contexts()[c], &g, &xi))?;
    Ok(format!("4 suites x {N} cases"))
}

fn tree() -> Outcome {
    let e = ext(3, 1, &[0, 1]);
    let q = e.fq().q();
    for r in 1..=6 {
        let ball = build_ball(&e, r).map_err(|x| x.to_string())?;
        ensure(ball.check_tree(), format!("ball of radius {r} is not a tree"))?;
        let [v0, v1] = ball.valences();
        ensure(v0.iter().chain(&v1).all(|&n| n == q + 1), format!("valence other than {} at radius {r}", q + 1))?;
        ensure(r < 2 || (!v0.is_empty() && !v1.is_empty()), "one parity class is missing")?;
    }
    let e0 = e.clone();
    run(1_000, (raw_ell(), -6i64..=6), move |(x, i)| apartment_formulas(&e0, &x, i))?;
    let ball = build_ball(&e, 6).unwrap();
    let e1 = e.clone();
    let verts: Vec<Vertex> = ball.vertices.clone();
    run(500, (prop::collection::vec(raw_gen(), 1..3), any::<prop::sample::Index>()), move |(g, k)| {
        neighbor_equivariance(&e1, &g, &verts[k.index(verts.len())])
    })?;
    Ok(format!("radius 1..6 trees, {}-regular; apartment and equivariance suites", q + 1))
}

/// Entries with pole order at most 1 at Q.
fn small_ell() -> impl Strategy<Value = (RawRat, RawRat)> {
    let c = || prop::collection::vec(any::<u16>(), 0..2);
    ((c(), Just(vec![])), (c(), Just(vec![])))
}

/// Boundary points (u, v) with u, v of pole order at most 3, and infinity.
fn scan_points(e: &Ext) -> Vec<BPoint> {
    let f = e.fq();
    let q = f.q() as u16;
    let mut out = vec![BPoint::Infinity];
    let half = f.inv(FqElem(2)).unwrap();
    for n in 0..(q as usize).pow(6) {
        let d: Vec<u16> = (0..6).map(|k| ((n / (q as usize).pow(k)) % q as usize) as u16).collect();
        // u = a0 + a1 t + (b0 + b1 t) w; v = -N(u)/2 + (c0 + c1 t) w
        let u = EllElem::from_polys(poly(f, &d[0..2]), poly(f, &d[2..4]));
        let a = e.norm(&u).neg(f).scale(f, half);
        let v = EllElem::new(a, RatF::from(poly(f, &d[4..6])));
        out.push(BPoint::finite(e, u, v).unwrap());
    }
    out
}

fn fixed_points() -> Outcome {
    let e = ext(3, 1, &[0, 1]);
    let scan = scan_points(&e);
    let lines: Vec<_> = scan.iter().map(|x| boundary_line(&e, x)).collect();
    let strat = (
        prop::option::weighted(0.8, (small_ell(), (prop::collection::vec(any::<u16>(), 0..2), Just(vec![])))),
        prop::collection::vec((small_ell(), (prop::collection::vec(any::<u16>(), 0..2), Just(vec![]))), 1..3),
        prop::collection::vec(raw_gen(), 0..2),
    );
    let mut rng = runner(1);
    let mut groups = 0;
    let mut attempts = 0;
    while groups < 20 {
        attempts += 1;
        if attempts > 200 {
            return Err("could not sample 20 nontrivial p-subgroups".into());
        }
        let (xi, us, conj) = strat.new_tree(&mut rng).unwrap().current();
        let xi = point(&e, &xi);
        let g = mk_guv(&e, &xi);
        let c = product(&e, &conj);
        let gens: Vec<UMatrix> = us
            .iter()
            .map(|(u, b)| {
                let (u, v) = hpair(&e, u, b);
                let x = g.inv(&e).mul(&e, &mk_ua(&e, &u, &v).unwrap()).mul(&e, &g);
                c.mul(&e, &x).mul(&e, &c.inv(&e))
            })
            .filter(|x| !x.is_identity())
            .collect();
        if gens.is_empty() {
            continue;
        }
        groups += 1;
        let eta = fixed_boundary_point(&e, &gens, 81).map_err(|x| x.to_string())?;
        let expected = boundary_act(&e, &c, &xi).unwrap();
        ensure(eta == expected, format!("group {groups}: fixed point {} expected {}", eta.fmt(&e), expected.fmt(&e)))?;
        for h in &gens {
            ensure(boundary_act(&e, h, &eta).unwrap() == eta, format!("group {groups}: point not fixed"))?;
        }
        for (pt, l) in scan.iter().zip(&lines) {
            if *pt != eta && gens.iter().all(|h| line_act(&e, h, l) == *l) {
                return Err(format!("group {groups}: second fixed point {}", pt.fmt(&e)));
            }
        }
    }
    Ok(format!("20 groups, {} boundary points scanned each", scan.len()))
}

fn cusps() -> Outcome {
    let mut parts = Vec::new();
    for (d, radius, expect) in [(&[0i64, 1][..], 6, 1usize), (&[0, -1, 0, 1][..], 9, 4)] {
        let e = ext(3, 1, d);
        let ball = build_ball(&e, radius).unwrap();
        let mut go = GammaOrbits::new(&e).unwrap();
        let qg = quotient_ball(&mut go, &ball, &SubgroupSpec::Full).map_err(|x| x.to_string())?;
        let cr = detect_cusp_rays(&qg, &ball.parent);
        ensure(cr.uncertified.is_empty(), format!("D = {d:?}: {} uncertified paths", cr.uncertified.len()))?;
        ensure(cr.rays.len() == expect, format!("D = {d:?}: {} rays, expected {expect}", cr.rays.len()))?;
        let h = class_group(&e, e.m() + 1, 3).map_err(|x| x.to_string())?.order;
        ensure(h == cr.rays.len(), format!("D = {d:?}: class number {h} but {} rays", cr.rays.len()))?;
        if e.m() == 1 {
            // genus one: the class number is the number of rational points
            ensure(curve_point_count(&e) == h, "point count disagrees with the class group")?;
        }
        parts.push(format!("D={d:?}: {} rays, h={h}", cr.rays.len()));
    }
    Ok(parts.join("; "))
}

struct JQuotient {
    e: Ext,
    spec: SubgroupSpec,
    ball: unitree::local::Ball,
    go: GammaOrbits,
    labels: unitree::quotient::BallLabels,
    qg: unitree::quotient::QuotientGraph,
}

fn gamma_j(radius: usize) -> JQuotient {
    let e = ext(3, 1, &[0, 1]);
    let spec = SubgroupSpec::congruence(j_omega(&e, 1));
    let ball = build_ball(&e, radius).unwrap();
    let mut go = GammaOrbits::new(&e).unwrap();
    let labels = label_ball(&mut go, &ball).unwrap();
    let qg = quotient_from_labels(&mut go, &ball, &labels, &spec).unwrap();
    JQuotient { e, spec, ball, go, labels, qg }
}

fn euler(j: &JQuotient) -> Outcome {
    let mut last = None;
    for r in 2..=j.qg.radius {
        let x = euler_report(&j.qg.window(r), &j.spec, 3, false).map_err(|x| x.to_string())?;
        ensure(x.stable, format!("l0, l1 change from R={} to R={r}", r - 1))?;
        ensure(x.chi < 0, format!("chi = {} at R={r}", x.chi))?;
        ensure(x.matched_pairs, format!("unmatched unstable orbit at R={r}"))?;
        ensure(x.cancellation_residual.is_zero(), format!("residual off the outer sphere at R={r}"))?;
        last = Some(x);
    }
    let x = last.unwrap();
    Ok(format!("l0={} l1={} chi={} stable R=2..{}", x.l0, x.l1, x.chi, j.qg.radius))
}

fn acyclic(j: &JQuotient) -> Outcome {
    for r in 1..=j.qg.radius {
        ensure(j.qg.window(r).is_tree(), format!("quotient window {r} has a cycle"))?;
    }
    let gog = graph_of_groups(&j.go, &j.ball, &j.labels, &j.qg, &j.spec).map_err(|x| x.to_string())?;
    let ab = abelianization(&j.e, &gog).map_err(|x| x.to_string())?;
    let chi = euler_report(&j.qg, &j.spec, 3, false).map_err(|x| x.to_string())?.chi;
    ensure(ab.free_rank == 0, format!("free rank {}", ab.free_rank))?;
    ensure(-chi > 0, "chi is not negative")?;
    Ok(format!("windows 1..{} are trees; d = 0, -chi = {}", j.qg.radius, -chi))
}

fn homology(j: &JQuotient) -> Outcome {
    let gog = graph_of_groups(&j.go, &j.ball, &j.labels, &j.qg, &j.spec).map_err(|x| x.to_string())?;
    let ab = abelianization(&j.e, &gog).map_err(|x| x.to_string())?;
    let eu = euler_report(&j.qg, &j.spec, 3, false).map_err(|x| x.to_string())?;
    let rays = detect_cusp_rays(&j.qg, &j.ball.parent);
    let pieces = cusp_pieces(&j.go, &j.ball, &j.labels, &j.qg, &rays.rays, &j.spec, 10).map_err(|x| x.to_string())?;
    let rep = check_homology(&j.e, &j.qg, &eu, &ab, &pieces);
    ensure(rep.steinberg_matches, format!("steinberg {} relative H1 {} chi {}", rep.steinberg_rank, rep.h1_rel_rank, rep.chi))?;
    ensure(rep.free_rank_is_cycle_rank && rep.free_rank_bounded, "free rank check")?;
    ensure(rep.torsion_is_p_group, "torsion is not a 3-group")?;
    ensure(rep.torsion_matches_cusps, format!("p-rank {} vs cusp p-rank {}", rep.torsion_p_rank, rep.cusp_p_rank))?;
    Ok(format!(
        "steinberg={} free={} cycle={} p-rank={} cusp p-rank={} ({} cusps)",
        rep.steinberg_rank,
        ab.free_rank,
        rep.cycle_rank,
        rep.torsion_p_rank,
        rep.cusp_p_rank,
        pieces.len()
    ))
}

fn census() -> Outcome {
    let e = ext(3, 1, &[0, 1]);
    let g = finite_order_census(&e, &SubgroupSpec::Full, 1, 64).map_err(|x| x.to_string())?;
    ensure(g.has_order(2), "no element of order 2 in the gamma window")?;
    let spec = SubgroupSpec::congruence(j_omega(&e, 1));
    let gj = finite_order_census(&e, &spec, 2, 64).map_err(|x| x.to_string())?;
    ensure(gj.only_p_powers(3), format!("orders {:?} in the congruence window", gj.orders))?;
    ensure(gj.has_order(3), "no torsion found in the congruence window")?;
    Ok(format!("gamma orders {:?}; congruence orders {:?}", g.orders, gj.orders))
}

/// Number of elements of the image mod J^2 that reduce to the identity mod J.
fn index_by_cosets(go: &GammaOrbits, e: &Ext) -> std::result::Result<usize, String> {
    let r1 = QuotRing::new(j_omega(e, 1));
    let r2 = QuotRing::new(j_omega(e, 2));
    let img = congruence_image(go, &r2, 1 << 20).map_err(|x| x.to_string())?;
    let id = r1.mat_identity(e);
    let d = r2.dim();
    let mut count = 0;
    for m in &img {
        let mut red = Vec::new();
        for k in 0..9 {
            red.extend(r1.reduce(e, &r2.lift(&m.0[k * d..(k + 1) * d])).map_err(|x| x.to_string())?);
        }
        if red == id.0 {
            count += 1;
        }
    }
    Ok(count)
}

fn multiplicativity(chi_j: i64) -> Outcome {
    let e = ext(3, 1, &[0, 1]);
    let radius = 10;
    let ball = build_ball(&e, radius).unwrap();
    let mut go = GammaOrbits::new(&e).unwrap();
    let labels = label_ball(&mut go, &ball).unwrap();
    let spec = SubgroupSpec::congruence(j_omega(&e, 2));
    let qg = quotient_from_labels(&mut go, &ball, &labels, &spec).map_err(|x| x.to_string())?;
    let x = euler_report(&qg, &spec, 3, false).map_err(|x| x.to_string())?;
    ensure(x.stable, format!("chi(J^2) not stable at R={radius}"))?;
    let index = index_by_cosets(&go, &e)?;
    ensure(
        x.chi == index as i64 * chi_j,
        format!("chi(J^2) = {} but index {index} x chi(J) = {}", x.chi, index as i64 * chi_j),
    )?;
    Ok(format!("chi(J^2) = {} = {index} x ({chi_j})", x.chi))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg} [{secs:.1}s]")
            }
        }
    };
    report(1, "algebra", &mut algebra);
    report(2, "unitary", &mut unitary);
    report(3, "tree", &mut tree);
    report(4, "fixed points", &mut fixed_points);
    report(5, "cusps", &mut cusps);
    let j = gamma_j(6);
    report(6, "euler characteristic", &mut || euler(&j));
    report(7, "acyclic congruence quotient", &mut || acyclic(&j));
    report(8, "homology", &mut || homology(&j));
    report(9, "torsion census", &mut census);
    let chi_j = euler_report(&j.qg, &j.spec, 3, false).map(|x| x.chi).unwrap_or(0);
    report(10, "multiplicativity", &mut || multiplicativity(chi_j));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

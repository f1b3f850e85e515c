//! Acceptance suite: one PASS/FAIL line per criterion, in order. Runs without
//! the libtest harness so the lines are printed as they are decided; exits
//! nonzero when any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdist::cayley::{bfs_ball, diameter, exp_radical_scan, girth, DEFAULT_VERTEX_CAP};
use qdist::distortion::{distortion_equivariant, exact_c2, optimize_embedding, EmbedOptions, MetricTable};
use qdist::embed::{build_bundle, EmbeddingBundle};
use qdist::group::{project, Element, Family, Group, SpecParams};
use qdist::linalg::lp_norm;
use qdist::profile::{check_certificate, profile_curve, ProfileOptions};

const CAP: usize = DEFAULT_VERTEX_CAP;

fn group(p: SpecParams) -> Group {
    Group::from_params(&p).expect("valid spec")
}

fn lamp(n: u64) -> Group {
    group(SpecParams::new(Family::LamplighterFin).m(2).n(n))
}

fn bs(n: u64) -> Group {
    group(SpecParams::new(Family::BsFin).m(2).n(n))
}

fn sol(n: u64) -> Group {
    group(SpecParams::new(Family::SolFin).n(n))
}

fn band(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Bundles at the default scale, shared between criteria.
#[derive(Default)]
struct Bundles(HashMap<(String, u64), Rc<(EmbeddingBundle, f64)>>);

impl Bundles {
    /// The bundle and its measured distortion.
    fn get(&mut self, g: &Group, p: f64) -> Rc<(EmbeddingBundle, f64)> {
        let key = (g.spec().label(), p.to_bits());
        self.0
            .entry(key)
            .or_insert_with(|| {
                let b = build_bundle(g, p, None, &ProfileOptions::default(), CAP).expect("bundle");
                let ball = bfs_ball(g, None, CAP).expect("ball");
                let d = distortion_equivariant(&b, &ball, None).expect("distortion").dist;
                Rc::new((b, d))
            })
            .clone()
    }
}

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn report(id: u32, title: &str, budget: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let took = start.elapsed();
    let in_time = took <= budget;
    let pass = out.pass && in_time;
    for d in &out.details {
        println!("      {d}");
    }
    println!(
        "{} criterion {id:>2}: {title}: {} [{:.1?} of {:?}{}]",
        if pass { "PASS" } else { "FAIL" },
        out.summary,
        took,
        budget,
        if in_time { "" } else { ", over budget" }
    );
    pass
}

/// Random element: uniform by code for finite groups, a random word of
/// length up to 24 otherwise.
fn random_element(g: &Group, rng: &mut ChaCha8Rng) -> Element {
    match g.order() {
        Some(order) => g.decode(rng.random_range(0..order)),
        None => random_word(g, rng, 24),
    }
}

fn random_word(g: &Group, rng: &mut ChaCha8Rng, max_len: usize) -> Element {
    let gens = g.generators();
    let len = rng.random_range(0..=max_len);
    (0..len).fold(g.identity(), |x, _| g.mul(&x, &gens[rng.random_range(0..gens.len())]).unwrap())
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let finite = [
        group(SpecParams::new(Family::LamplighterFin).m(2).n(6)),
        group(SpecParams::new(Family::BsFin).m(3).n(4)),
        group(SpecParams::new(Family::SolFin).n(7)),
    ];
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for q in &finite {
        let parent = Group::new(q.spec().parent()).unwrap();
        for g in [q, &parent] {
            let e = g.identity();
            let mut bad = 0;
            for _ in 0..1000 {
                let (x, y, z) = (random_element(g, &mut rng), random_element(g, &mut rng), random_element(g, &mut rng));
                let xy = g.mul(&x, &y).unwrap();
                let ok = g.mul(&xy, &z).unwrap() == g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap()
                    && g.mul(&x, &e).unwrap() == x
                    && g.mul(&e, &x).unwrap() == x
                    && g.mul(&x, &g.inv(&x).unwrap()).unwrap() == e
                    && g.parse(&g.format(&x)).unwrap() == x
                    && g.code(&x).is_none_or(|c| g.decode(c) == x);
                bad += usize::from(!ok);
            }
            let spec_back = Group::from_params(&serde_json::from_value(serde_json::to_value(g.spec().params()).unwrap()).unwrap()).unwrap();
            if spec_back.spec() != g.spec() {
                bad += 1;
            }
            details.push(format!("{}: axioms and round trips, 1000 cases, {bad} failures", g.spec().label()));
            if bad > 0 {
                failures.push(g.spec().label());
            }
        }
        let mut bad = 0;
        for _ in 0..1000 {
            let (x, y) = (random_word(&parent, &mut rng, 24), random_word(&parent, &mut rng, 24));
            let lhs = project(&parent, q, &parent.mul(&x, &y).unwrap()).unwrap();
            let rhs = q.mul(&project(&parent, q, &x).unwrap(), &project(&parent, q, &y).unwrap()).unwrap();
            bad += usize::from(lhs != rhs);
        }
        let images: BTreeSet<String> =
            parent.generators().iter().map(|s| q.format(&project(&parent, q, s).unwrap())).collect();
        let gens: BTreeSet<String> = q.generators().iter().map(|s| q.format(s)).collect();
        bad += usize::from(images != gens);
        details.push(format!("{} -> {}: homomorphism, 1000 cases, {bad} failures", parent.spec().label(), q.spec().label()));
        if bad > 0 {
            failures.push(format!("projection onto {}", q.spec().label()));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: if failures.is_empty() { "all exact".into() } else { format!("failures in {failures:?}") },
        details,
    }
}

fn criterion_2() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let mut worst_l: f64 = 0.0;
    for n in 2..=12 {
        let d = diameter(&lamp(n), CAP).unwrap().diameter;
        ok &= d as u64 <= 5 * n;
        worst_l = worst_l.max(d as f64 / n as f64);
    }
    let mut worst_bs: f64 = 0.0;
    for n in 2..=14 {
        let d = diameter(&bs(n), CAP).unwrap().diameter;
        ok &= d as u64 <= 3 * n;
        worst_bs = worst_bs.max(d as f64 / n as f64);
    }
    let mut ratios = Vec::new();
    for n in [3, 5, 7, 11, 13] {
        let rep = diameter(&sol(n), CAP).unwrap();
        let dn = rep.diam_n.unwrap();
        ratios.push(dn as f64 / (n as f64).ln());
        details.push(format!("SOL({n}): diam {} diam_N {dn} diam_N/ln n {:.3}", rep.diameter, ratios.last().unwrap()));
    }
    let w = band(&ratios);
    ok &= w <= 3.0;
    Outcome {
        pass: ok,
        summary: format!("max diam/n: L {worst_l:.3} (<= 5), BS {worst_bs:.3} (<= 3); SOL band {w:.3} (<= 3)"),
        details,
    }
}

/// Largest r with |B_quotient(r)| = |B_parent(r)|: no ball isometry exists
/// beyond it, whatever the map.
fn cardinality_limit(parent: &Group, quotient: &Group, r_max: u32) -> u32 {
    let pb = bfs_ball(parent, Some(r_max), CAP).unwrap();
    let qb = bfs_ball(quotient, None, CAP).unwrap();
    let cum = |s: &[usize], r: usize| s.iter().take(r + 1).sum::<usize>();
    (0..=r_max).take_while(|&r| cum(pb.spheres(), r as usize) == cum(qb.spheres(), r as usize)).last().unwrap_or(0)
}

fn criterion_3() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let mut cases: Vec<(Group, u32)> = Vec::new();
    for n in 3..=6u64 {
        cases.push((lamp(n), n.min(6) as u32));
        cases.push((bs(n), n.min(6) as u32));
    }
    for n in [5, 7] {
        cases.push((sol(n), 2));
    }
    let mut short = 0;
    for (q, need) in &cases {
        let parent = Group::new(q.spec().parent()).unwrap();
        let rep = girth(&parent, q, 6, CAP).unwrap();
        let limit = cardinality_limit(&parent, q, 8);
        let pass = rep.g_lower >= *need;
        ok &= pass;
        short += usize::from(!pass);
        details.push(format!(
            "{}: g_lower {} (need {need}), kernel systole {:?}, ball sizes diverge after r = {limit}",
            q.spec().label(),
            rep.g_lower,
            rep.systole
        ));
    }
    Outcome {
        pass: ok,
        summary: format!("{short} of {} pairs below the required girth", cases.len()),
        details,
    }
}

fn criterion_4() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let mut c_hats = Vec::new();
    let (mut worst_grad, mut worst_rel) = (0.0f64, 0.0f64);
    for n in [6, 8, 10, 12] {
        let g = lamp(n);
        let d = diameter(&g, CAP).unwrap().diameter;
        let radii: Vec<u32> = (1..=d / 2).collect();
        let curve = profile_curve(&g, 2.0, &radii, &ProfileOptions::default(), CAP).unwrap();
        for tv in &curve.vectors {
            let chk = check_certificate(tv, &g, CAP).unwrap();
            worst_grad = worst_grad.max((chk.gradient_max - 1.0).abs());
            worst_rel = worst_rel.max(chk.relative_error);
            ok &= chk.support_ok && (chk.gradient_max - 1.0).abs() <= 1e-9 && chk.relative_error <= 1e-9;
        }
        let monotone = curve.points.windows(2).all(|w| w[1].certified_j >= w[0].certified_j);
        ok &= monotone;
        let c = curve.c_hat.unwrap();
        c_hats.push(c);
        details.push(format!("L(2,{n}): {} radii, C_hat {c:.4}, monotone {monotone}", radii.len()));
    }
    let w = band(&c_hats);
    ok &= w <= 2.0;
    Outcome {
        pass: ok,
        summary: format!("certificates within |grad-1| {worst_grad:.1e}, rel {worst_rel:.1e}; C_hat band {w:.3} (<= 2)"),
        details,
    }
}

fn criterion_5(cache: &mut Bundles) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut details = Vec::new();
    let p = 2.0;
    let g = lamp(6);
    let bundle = cache.get(&g, p);
    let b = &bundle.0;
    let ball = bfs_ball(&g, None, CAP).unwrap();
    let a = b.apriori_bound();

    // Cocycle identity F(gh) = F(g) + pi(g) F(h).
    let mut cocycle_err: f64 = 0.0;
    for x in ball.elements() {
        let fx = b.embed_point(x).unwrap();
        for _ in 0..16 {
            let y = random_element(&g, &mut rng);
            let fy = b.embed_point(&y).unwrap();
            let moved = b.linear_action(x, &fy).unwrap();
            let fxy = b.embed_point(&g.mul(x, &y).unwrap()).unwrap();
            for i in 0..fxy.len() {
                cocycle_err = cocycle_err.max((fxy[i] - fx[i] - moved[i]).abs());
            }
        }
    }
    details.push(format!("cocycle identity on {} x 16 pairs: max error {cocycle_err:.2e}", ball.len()));

    // Equivariance of pairwise distances on L(2,4), all pairs.
    let small = lamp(4);
    let sb = cache.get(&small, p);
    let points: Vec<Vec<f64>> = (0..64).map(|c| sb.0.embed_point(&small.decode(c)).unwrap()).collect();
    let mut equi_err: f64 = 0.0;
    for i in 0..64u64 {
        for j in 0..64u64 {
            let (x, y) = (small.decode(i), small.decode(j));
            let direct = lp_norm(points[i as usize].iter().zip(&points[j as usize]).map(|(u, v)| u - v), p);
            let via = sb.0.embed_norm(&small.mul(&small.inv(&x).unwrap(), &y).unwrap()).unwrap();
            let rel = (direct - via).abs() / via.max(1e-300);
            equi_err = equi_err.max(if via == 0.0 { direct } else { rel });
        }
    }
    details.push(format!("L(2,4) pairwise distances vs embed_norm: max relative error {equi_err:.2e}"));

    // Lipschitz, co-Lipschitz, F(e) = 0 and injectivity on L(2,6).
    let norms = b.all_norms();
    let (mut lip_ok, mut colip_ok) = (true, true);
    let mut min_margin = f64::INFINITY;
    for (x, &l) in ball.elements().iter().zip(ball.lengths()) {
        let v = norms[g.code(x).unwrap() as usize];
        lip_ok &= v <= l as f64 * a.lip_bound + 1e-9;
        if l > 0 {
            let floor = 2f64.powf(1.0 / p) * (l as f64 / 8.0).max(1.0);
            colip_ok &= v >= floor - 1e-9;
            min_margin = min_margin.min(v / floor);
        }
    }
    let origin = b.embed_point(&g.identity()).unwrap().iter().all(|&x| x == 0.0);
    let injective = norms.iter().enumerate().all(|(c, &v)| c as u64 == g.code(&g.identity()).unwrap() || v > 0.0);
    details.push(format!("lip_bound {:.4}; smallest norm / co-Lipschitz floor {min_margin:.4}", a.lip_bound));
    let pass = cocycle_err <= 1e-9 && equi_err <= 1e-9 && lip_ok && colip_ok && origin && injective;
    Outcome {
        pass,
        summary: format!("cocycle {cocycle_err:.1e}, equivariance {equi_err:.1e}, lip {lip_ok}, colip {colip_ok}, F(e)=0 {origin}, injective {injective}"),
        details,
    }
}

fn check_bound(cache: &mut Bundles, g: &Group, p: f64) -> (bool, String) {
    let b = cache.get(g, p);
    let bound = b.0.apriori_bound().dist_bound;
    let ok = b.1 <= bound * (1.0 + 1e-9);
    (ok, format!("{} p={p}: dist {:.4} <= bound {bound:.4}: {ok}", g.spec().label(), b.1))
}

fn criterion_6(cache: &mut Bundles) -> Outcome {
    let mut groups: Vec<Group> = (2..=12).map(lamp).collect();
    groups.extend((2..=12).map(bs));
    groups.extend([5, 7, 11].map(sol));
    let mut details = Vec::new();
    let mut bad = 0;
    for g in &groups {
        let (ok, line) = check_bound(cache, g, 2.0);
        bad += usize::from(!ok);
        details.push(line);
    }
    Outcome { pass: bad == 0, summary: format!("{} bundles, {bad} above their bound", groups.len()), details }
}

fn criterion_7(cache: &mut Bundles) -> Outcome {
    let mut details = Vec::new();
    let mut ratios = Vec::new();
    let mut closed_ok = true;
    for p in [2.0, 3.0] {
        for n in [4, 6, 8, 10, 12] {
            let g = lamp(n);
            let b = cache.get(&g, p);
            let closed = b.0.apriori_bound().paper_closed_form.unwrap();
            let ratio = b.1 / (b.0.diameter as f64).ln().powf(1.0 / p);
            closed_ok &= b.1 <= closed;
            ratios.push(ratio);
            details.push(format!(
                "L(2,{n}) p={p}: diam {} dist {:.4} ratio {ratio:.4} closed form {closed:.4} (C_hat {:.4})",
                b.0.diameter,
                b.1,
                b.0.c_hat().unwrap()
            ));
        }
    }
    let w = band(&ratios);
    Outcome {
        pass: w <= 3.0 && closed_ok,
        summary: format!("ratio band {w:.3} (<= 3), dist <= closed form: {closed_ok}"),
        details,
    }
}

fn criterion_8(cache: &mut Bundles) -> Outcome {
    let mut details = Vec::new();
    let mut ratios = Vec::new();
    let mut ok = true;
    for p in [2.0, 3.0] {
        for n in [5, 7, 11, 13] {
            let g = sol(n);
            let b = cache.get(&g, p);
            let id = g.code(&g.identity()).unwrap() as usize;
            let injective = b.0.all_norms().iter().enumerate().all(|(c, &v)| c == id || v > 0.0);
            let bound = b.0.apriori_bound().dist_bound;
            let order = g.order().unwrap() as f64;
            let ratio = b.1 / (order.ln().ln() + 1.0).powf(1.0 / p);
            ok &= injective && b.1 <= bound * (1.0 + 1e-9) && b.0.circle.is_some();
            ratios.push(ratio);
            details.push(format!(
                "SOL({n}) p={p}: |G| {order} dist {:.4} bound {bound:.4} ratio {ratio:.4} injective {injective}",
                b.1
            ));
        }
    }
    let w = band(&ratios);
    Outcome { pass: ok && w <= 4.0, summary: format!("all injective and bounded: {ok}; ratio band {w:.3} (<= 4)"), details }
}

#[allow(clippy::approx_constant)] // the stated target value
fn criterion_9() -> Outcome {
    let cases = [
        ("P5", MetricTable::path(5).unwrap(), 1.0, 1e-6f64),
        ("C4", MetricTable::cycle(4).unwrap(), 1.41421, 1e-4),
        ("K13", MetricTable::star(3).unwrap(), 1.1547, 1e-3),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (name, m, want, tol) in cases {
        let start = Instant::now();
        let exact = exact_c2(&m, tol).unwrap();
        let took = start.elapsed();
        let (_, heur) = optimize_embedding(&m, 2.0, m.len() - 1, &EmbedOptions::default()).unwrap();
        let close = (exact.c2 - want).abs() <= tol;
        let below = exact.c2 <= heur.dist + tol;
        ok &= close && below && took < Duration::from_secs(10);
        details.push(format!(
            "{name}: c2 {:.7} (expected {want} +- {tol}), heuristic {:.7}, {took:.2?}",
            exact.c2, heur.dist
        ));
    }
    Outcome { pass: ok, summary: "values, heuristic comparison and per-case time".into(), details }
}

fn criterion_10() -> Outcome {
    let g = group(SpecParams::new(Family::SolInf));
    let rep = exp_radical_scan(&g, 12, CAP).unwrap();
    let alpha = rep.sandwich_alpha(3);
    let rows: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| r.r >= 3)
        .map(|r| format!("r {:>2}: max ln|v| {:.4}", r.r, r.max_log_norm))
        .collect();
    let covered = rep.rows.iter().filter(|r| r.r >= 3).count() == 10;
    Outcome { pass: alpha <= 3.0 && covered, summary: format!("fitted alpha {alpha:.4} (<= 3) over r = 3..12"), details: rows }
}

fn main() {
    let mut cache = Bundles::default();
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        report(1, "group axioms, projections, round trips", Duration::from_secs(5), criterion_1),
        report(2, "diameter bounds", min(2), criterion_2),
        report(3, "relative girth of quotients", min(2), criterion_3),
        report(4, "profile certificates and C_hat stability", min(3), criterion_4),
        report(5, "embedding invariants on L(2,6)", min(2), || criterion_5(&mut cache)),
        report(6, "distortion within a-priori bound", min(5), || criterion_6(&mut cache)),
        report(7, "lamplighter scaling band", min(10), || criterion_7(&mut cache)),
        report(8, "SOL composite embedding", min(10), || criterion_8(&mut cache)),
        report(9, "exact Euclidean distortion oracle", Duration::from_secs(30), criterion_9),
        report(10, "SOL kernel distortion sandwich", min(2), criterion_10),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i + 1).collect();
    println!("acceptance: {} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

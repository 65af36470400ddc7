//! Acceptance suite: every release criterion at its pinned tolerance, one
//! pass line per criterion (visible with --nocapture). The data-gated
//! integration criterion lives in the CLI crate.

use std::time::Instant;

use arclink::assess::{assess_solutions, p1_star, p1_star_gradients, spurious_check};
use arclink::bipoly::{sylvester_resultant, EliminateVar};
use arclink::config::{J2_EARTH, MU_EARTH, MU_SUN, OMEGA_EARTH, R_EARTH};
use arclink::geometry::{Epoch, State6, Vec3};
use arclink::j2::{j2_linkage, J2Config};
use arclink::kepler::keplerian_to_cartesian;
use arclink::linkage::{build_q, build_xi_p1_p2, eliminate, epoch_geometry, solve_linkage};
use arclink::prefilter::{accept_pair, RangeBox};
use arclink::synth::{
    geocentric_station, heliocentric_observer, propagate_j2_rk4, random_elliptic_elements,
    random_generic_inputs, scenario_from_elements, scenario_from_states, Scenario,
};
use arclink::{KeplerianElements, LinkConfig, UnitMode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const POPULATION_SEED: u64 = 20240811;

fn synthetic_population(n: usize) -> Vec<Scenario> {
    let mut rng = StdRng::seed_from_u64(POPULATION_SEED);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let el = random_elliptic_elements(&mut rng, Epoch::new(54000.0));
        let t1 = 54000.0 + rng.gen_range(0.0..365.0);
        let t2 = t1 + rng.gen_range(30.0..600.0);
        match scenario_from_elements(&el, t1, t2, UnitMode::Heliocentric, MU_SUN, 1e-8, |t| {
            heliocentric_observer(t, 0.0)
        }) {
            Ok(sc) => out.push(sc),
            Err(_) => continue, // pathological draw (object at the observer)
        }
    }
    out
}

#[test]
fn criterion_1_synthetic_roundtrip() {
    let cfg = LinkConfig::heliocentric();
    let population = synthetic_population(50);
    let started = Instant::now();
    let mut recovered = 0;
    let mut flagged_failures = 0;
    let mut unflagged_failures = Vec::new();
    for (k, sc) in population.iter().enumerate() {
        let outcome = match solve_linkage(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg) {
            Ok(o) => o,
            Err(_) => {
                flagged_failures += 1; // a hard degeneracy error is its own flag
                continue;
            }
        };
        let solutions = assess_solutions(&outcome, &sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg);
        let t = &sc.truth;
        let hit = solutions.iter().filter(|s| s.accepted).any(|s| {
            ((s.raw.rho1 - t.rho1) / t.rho1).abs() < 1e-6
                && ((s.raw.rho2 - t.rho2) / t.rho2).abs() < 1e-6
                && ((s.raw.rhodot1 - t.rhodot1) / t.rhodot1.abs().max(1e-12)).abs() < 1e-6
                && ((s.raw.rhodot2 - t.rhodot2) / t.rhodot2.abs().max(1e-12)).abs() < 1e-6
        });
        if hit {
            recovered += 1;
        } else if !outcome.nondegeneracy.all_pass() {
            flagged_failures += 1;
        } else {
            unflagged_failures.push(k);
        }
    }
    let elapsed = started.elapsed();
    assert!(
        recovered >= 48,
        "recovered {recovered}/50 (flagged {flagged_failures}, unflagged {unflagged_failures:?})"
    );
    assert!(
        unflagged_failures.is_empty(),
        "unflagged failures at {unflagged_failures:?}"
    );
    assert!(elapsed.as_secs_f64() < 5.0, "runtime {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: {recovered}/50 recovered at 1e-6, {flagged_failures} flagged, {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_2_degree_nine_theorem() {
    let cfg = LinkConfig::heliocentric();
    let population = synthetic_population(50);
    let mut checked = 0;
    for sc in &population {
        let outcome = match solve_linkage(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg) {
            Ok(o) => o,
            Err(_) => continue,
        };
        if !outcome.nondegeneracy.all_pass() {
            continue;
        }
        checked += 1;
        // degree detection at the root finder's own trim level: candidate
        // ranges can be huge, which legitimately compresses the leading
        // coefficient relative to the largest one
        assert_eq!(outcome.polys.elim.u1_tilde.trim(1e-12).deg(), 9);
        assert_eq!(outcome.polys.elim.u2_tilde.trim(1e-12).deg(), 9);
        assert_eq!(outcome.roots.len(), 9);
        for root in &outcome.roots {
            assert!(
                root.u2_residual <= cfg.tau_x,
                "cross-evaluation residual {:e} above tau_x",
                root.u2_residual
            );
        }
    }
    assert!(checked >= 40, "only {checked} non-flagged cases");
    println!(
        "ACCEPTANCE 2 PASS: degree 9 + cross-evaluation <= 1e-6 on {checked}/50 non-flagged cases"
    );
}

#[test]
fn criterion_3_resultant_identities() {
    let cfg = LinkConfig::heliocentric();
    let mut rng = StdRng::seed_from_u64(777);
    let mut done = 0;
    while done < 100 {
        let (a1, a2, o1, o2) = random_generic_inputs(&mut rng);
        let g1 = epoch_geometry(&a1, &o1).unwrap();
        let g2 = epoch_geometry(&a2, &o2).unwrap();
        let (q, rhodots) = match build_q(&g1, &g2, cfg.eps_deg) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let (_, p1, p2) = build_xi_p1_p2(&g1, &g2, &rhodots).unwrap();
        let elim = match eliminate(&p1, &p2, &q, &cfg) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let qb = q.as_bipoly();
        for (u, p, label) in [(&elim.u1, &p1, "u1"), (&elim.u2, &p2, "u2")] {
            let oracle = sylvester_resultant(p, &qb, EliminateVar::Rho1).unwrap();
            let scale = u.max_abs().max(oracle.max_abs());
            for k in 0..=u.deg().max(oracle.deg()) {
                assert!(
                    (u.coeff(k) - oracle.coeff(k)).abs() < 1e-8 * scale,
                    "{label}[{k}] differs from the Sylvester oracle"
                );
            }
        }
        done += 1;
    }
    println!(
        "ACCEPTANCE 3 PASS: u1 = q20^3 v1 and u2 = q20^4 v2 vs Sylvester oracle on {done} datasets"
    );
}

#[test]
fn criterion_4_lemma_suite() {
    let cfg = LinkConfig::heliocentric();
    let mut rng = StdRng::seed_from_u64(888);
    let mut done = 0;
    while done < 100 {
        let (a1, a2, o1, o2) = random_generic_inputs(&mut rng);
        let g1 = epoch_geometry(&a1, &o1).unwrap();
        let g2 = epoch_geometry(&a2, &o2).unwrap();
        let (q, rhodots) = match build_q(&g1, &g2, cfg.eps_deg) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let crit = match q.crit {
            Some(c) => c,
            None => continue,
        };
        let (xi, p1, p2) = build_xi_p1_p2(&g1, &g2, &rhodots).unwrap();

        // C = (rho1'', rho2'') lies on the conic and both angular momenta vanish there
        let (cx, cy) = (crit.rho1_second, crit.rho2_second);
        assert!(q.eval(cx, cy).abs() < 1e-9 * q.abs_eval(cx, cy).max(q.max_abs_coeff()));
        let co1 = g1.coeffs();
        let co2 = g2.coeffs();
        let c1 = co1.eval(cx, rhodots.rhodot1.eval(cx, cy));
        let c2 = co2.eval(cy, rhodots.rhodot2.eval(cx, cy));
        let s1 = co1.d.norm() + co1.e.norm() * cx * cx + co1.f.norm() * cx.abs() + co1.g.norm();
        let s2 = co2.d.norm() + co2.e.norm() * cy * cy + co2.f.norm() * cy.abs() + co2.g.norm();
        assert!(c1.norm() < 1e-9 * s1.max(1.0) * (1.0 + rhodots.rhodot1.eval(cx, cy).abs()));
        assert!(c2.norm() < 1e-9 * s2.max(1.0) * (1.0 + rhodots.rhodot2.eval(cx, cy).abs()));

        // xi does not vanish at C
        assert!(xi.eval(cx, cy).norm() > 1e-6 * xi.abs_eval(cx, cy).max(1e-300));

        // each projection vanishes at its own extraneous conic point
        let p1_at = p1.eval(crit.rho1_second, crit.rho2_prime).abs();
        assert!(p1_at < 1e-8 * p1.abs_eval(crit.rho1_second, crit.rho2_prime).max(1e-300));
        let p2_at = p2.eval(crit.rho1_prime, crit.rho2_second).abs();
        assert!(p2_at < 1e-8 * p2.abs_eval(crit.rho1_prime, crit.rho2_second).max(1e-300));
        done += 1;
    }
    println!("ACCEPTANCE 4 PASS: critical-point identities on {done} datasets");
}

#[test]
fn criterion_5_xi_degree_structure() {
    let cfg = LinkConfig::heliocentric();
    let mut rng = StdRng::seed_from_u64(999);
    let mut done = 0;
    while done < 100 {
        let (a1, a2, o1, o2) = random_generic_inputs(&mut rng);
        let g1 = epoch_geometry(&a1, &o1).unwrap();
        let g2 = epoch_geometry(&a2, &o2).unwrap();
        let (_, rhodots) = match build_q(&g1, &g2, cfg.eps_deg) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let (xi, p1, p2) = build_xi_p1_p2(&g1, &g2, &rhodots).unwrap();
        let dir = g1.frame.erho.cross(&g2.frame.erho);
        let scale = xi.max_abs() * dir.norm();
        for i in 0..=6usize {
            let coeff = xi.coeff(i, 6 - i);
            assert!(
                coeff.cross(&dir).norm() < 1e-9 * scale.max(1e-300),
                "degree-6 coefficient ({}, {}) not parallel to erho1 x erho2",
                i,
                6 - i
            );
        }
        assert_eq!(p1.total_degree(), 5);
        assert_eq!(p2.total_degree(), 5);
        done += 1;
    }
    println!(
        "ACCEPTANCE 5 PASS: top-degree parallelism and deg(p1) = deg(p2) = 5 on {done} datasets"
    );
}

#[test]
fn criterion_6_covariance_gradients() {
    // analytic p1* gradients vs central differences
    let mut rng = StdRng::seed_from_u64(1111);
    for _ in 0..50 {
        let rv = |rng: &mut StdRng, s: f64| {
            Vec3::new(
                rng.gen_range(-s..s),
                rng.gen_range(-s..s),
                rng.gen_range(-s..s),
            )
        };
        let (r1, v1, r2, v2, q1) = (
            rv(&mut rng, 2.0),
            rv(&mut rng, 1.0),
            rv(&mut rng, 2.0),
            rv(&mut rng, 1.0),
            rv(&mut rng, 1.0),
        );
        let grads = p1_star_gradients(&r1, &v1, &r2, &v2, &q1);
        let blocks = [grads.0, grads.1, grads.2, grads.3];
        for (b, analytic) in blocks.iter().enumerate() {
            for k in 0..3 {
                let h = 1e-6 * (1.0 + [r1, v1, r2, v2][b][k].abs());
                let mut plus = [r1, v1, r2, v2];
                let mut minus = [r1, v1, r2, v2];
                plus[b][k] += h;
                minus[b][k] -= h;
                let fd = (p1_star(&plus[0], &plus[1], &plus[2], &plus[3], &q1)
                    - p1_star(&minus[0], &minus[1], &minus[2], &minus[3], &q1))
                    / (2.0 * h);
                assert!(
                    (fd - analytic[k]).abs() / analytic[k].abs().max(1.0) < 1e-6,
                    "p1* gradient block {b} component {k}"
                );
            }
        }
    }

    // end-to-end dEcar1/dA against re-solve differences on a synthetic case
    let cfg = LinkConfig::heliocentric();
    let population = synthetic_population(50);
    let sc = population
        .iter()
        .find(|sc| {
            solve_linkage(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg)
                .map(|o| {
                    o.nondegeneracy.all_pass()
                        && o.solutions
                            .iter()
                            .any(|s| ((s.rho1 - sc.truth.rho1) / sc.truth.rho1).abs() < 1e-7)
                })
                .unwrap_or(false)
        })
        .expect("a clean synthetic case");
    let outcome = solve_linkage(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg).unwrap();
    let raw = *outcome
        .solutions
        .iter()
        .find(|s| ((s.rho1 - sc.truth.rho1) / sc.truth.rho1).abs() < 1e-7)
        .unwrap();
    let pack =
        arclink::assess::propagate_covariance(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &raw, &cfg).unwrap();

    for k in 0..8 {
        let base = if k < 4 {
            [sc.a1.alpha, sc.a1.delta, sc.a1.alphadot, sc.a1.deltadot][k]
        } else {
            [sc.a2.alpha, sc.a2.delta, sc.a2.alphadot, sc.a2.deltadot][k - 4]
        };
        let h = 1e-7 * (1.0 + base.abs());
        let solve_ecar = |sign: f64| -> [f64; 6] {
            let mut a1 = sc.a1.clone();
            let mut a2 = sc.a2.clone();
            let target = if k < 4 { &mut a1 } else { &mut a2 };
            match k % 4 {
                0 => target.alpha += sign * h,
                1 => target.delta += sign * h,
                2 => target.alphadot += sign * h,
                _ => target.deltadot += sign * h,
            }
            let out = solve_linkage(&a1, &a2, &sc.o1, &sc.o2, &cfg).unwrap();
            let s = out
                .solutions
                .iter()
                .min_by(|x, y| {
                    (x.rho2 - raw.rho2)
                        .abs()
                        .partial_cmp(&(y.rho2 - raw.rho2).abs())
                        .unwrap()
                })
                .unwrap();
            let (st1, _) = arclink::assess::states_from_raw(&a1, &a2, &sc.o1, &sc.o2, s).unwrap();
            [
                st1.r.x, st1.r.y, st1.r.z, st1.rdot.x, st1.rdot.y, st1.rdot.z,
            ]
        };
        let fp = solve_ecar(1.0);
        let fm = solve_ecar(-1.0);
        let col_scale = (0..6)
            .map(|i| pack.decar1_da[(i, k)].abs())
            .fold(0.0f64, f64::max)
            .max(1e-9);
        for i in 0..6 {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            assert!(
                (fd - pack.decar1_da[(i, k)]).abs() / col_scale < 1e-5,
                "dEcar1/dA ({i},{k}): fd {fd:e} vs analytic {:e}",
                pack.decar1_da[(i, k)]
            );
        }
    }
    println!("ACCEPTANCE 6 PASS: p1* gradients (1e-6) and solved-map Jacobian (1e-5) match finite differences");
}

#[test]
fn criterion_7_proposition_one() {
    let cfg = LinkConfig::heliocentric();
    let mu = cfg.mu;
    let mut rng = StdRng::seed_from_u64(1313);

    // constructed confocal pairs with |L1 - L2| = 2 flagged spurious
    for _ in 0..25 {
        let cnorm = rng.gen_range(0.6..1.4) * mu.sqrt();
        let e2 = rng.gen_range(0.05..0.4);
        let nu2 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let p2_slr = cnorm * cnorm / mu;
        let r2n = p2_slr / (1.0 + e2 * nu2.cos());
        let phat = Vec3::new(1.0, 0.0, 0.0);
        let qhat = Vec3::new(0.0, 1.0, 0.0);
        let r2 = (phat * nu2.cos() + qhat * nu2.sin()) * r2n;
        let v2 = (phat * (-nu2.sin()) + qhat * (e2 + nu2.cos())) * (mu / cnorm);
        let st2 = State6 {
            r: r2,
            rdot: v2,
            epoch: Epoch::new(0.0),
        };
        let r2hat = r2 / r2.norm();
        let lenz1 = phat * e2 + r2hat * 2.0;
        let e1 = lenz1.norm();
        let p1hat = lenz1 / e1;
        let q1hat = Vec3::new(0.0, 0.0, 1.0).cross(&p1hat);
        let nu1: f64 = 0.2;
        let r1n = p2_slr / (1.0 + e1 * nu1.cos());
        let st1 = State6 {
            r: (p1hat * nu1.cos() + q1hat * nu1.sin()) * r1n,
            rdot: (p1hat * (-nu1.sin()) + q1hat * (e1 + nu1.cos())) * (mu / cnorm),
            epoch: Epoch::new(0.0),
        };
        let (metrics, flags) = spurious_check(&st1, &st2, mu, &cfg);
        assert!(metrics.lenz_gap < 1e-10, "lenz gap {:e}", metrics.lenz_gap);
        assert!(flags.spurious_fullsys);
    }

    // true synthetic solutions are not: |L1 - L2| < 1e-8
    let population = synthetic_population(25);
    for sc in &population {
        let (metrics, flags) = spurious_check(&sc.state1, &sc.state2, MU_SUN, &cfg);
        assert!(
            metrics.lenz_diff < 1e-8,
            "lenz diff {:e}",
            metrics.lenz_diff
        );
        assert!(!flags.spurious_fullsys);
        assert!(!flags.spurious_intersys);
    }
    println!("ACCEPTANCE 7 PASS: confocal |L1-L2| = 2 pairs flagged, true pairs clean");
}

fn leo_j2_case(j2: f64, gap_periods: f64) -> (Scenario, f64) {
    let el = KeplerianElements {
        a: 7300.0,
        e: 0.015,
        inc: 51.6_f64.to_radians(),
        raan: 0.8,
        argp: 0.4,
        mean_anomaly: 0.9,
        epoch: Epoch::new(58000.0),
    };
    let st0 = keplerian_to_cartesian(&el, MU_EARTH).unwrap();
    let period = 2.0 * std::f64::consts::PI * (el.a.powi(3) / MU_EARTH).sqrt();
    let mjd1 = el.epoch.mjd + 0.13 + 0.55 * period / 86400.0;
    let mjd2 = mjd1 + gap_periods * period / 86400.0;
    let mut s1 = propagate_j2_rk4(
        &st0,
        (mjd1 - el.epoch.mjd) * 86400.0,
        MU_EARTH,
        j2,
        R_EARTH,
        0.5,
    );
    s1.epoch = Epoch::new(mjd1);
    let mut s2 = propagate_j2_rk4(&s1, gap_periods * period, MU_EARTH, j2, R_EARTH, 0.5);
    s2.epoch = Epoch::new(mjd2);
    let station = |state: &State6| {
        let r = state.r;
        let lat = (r.z / r.norm()).asin() - 0.12;
        let theta_ref = OMEGA_EARTH * (state.epoch.mjd - 51544.5) * 86400.0;
        let lon = r.y.atan2(r.x) - theta_ref + 0.18;
        geocentric_station(state.epoch, lat, lon)
    };
    let o1 = station(&s1);
    let o2 = station(&s2);
    let (a1, a2, truth) = scenario_from_states(&s1, &s2, &o1, &o2, 1e-8).unwrap();
    let sc = Scenario {
        a1,
        a2,
        o1,
        o2,
        state1: s1,
        state2: s2,
        truth,
        elements: el,
    };
    (sc, period)
}

#[test]
fn criterion_8_j2_suite() {
    let cfg = LinkConfig::geocentric();

    // J2 = 0 reproduces the unperturbed output in one iteration exactly
    let (sc0, _) = leo_j2_case(0.0, 4.37);
    let mut j2cfg = J2Config::earth();
    j2cfg.j2 = 0.0;
    let plain = solve_linkage(&sc0.a1, &sc0.a2, &sc0.o1, &sc0.o2, &cfg).unwrap();
    let out0 = j2_linkage(&sc0.a1, &sc0.a2, &sc0.o1, &sc0.o2, &cfg, &j2cfg).unwrap();
    for seed in &out0.seeds {
        assert!(seed.converged && seed.iterations == 1);
        let sol = seed.solution.as_ref().unwrap();
        assert!(plain
            .solutions
            .iter()
            .any(|s| s.rho1 == sol.raw.rho1 && s.rho2 == sol.raw.rho2));
    }

    // with Earth J2 the converged ranges beat the unperturbed answer
    let (sc, _) = leo_j2_case(J2_EARTH, 4.5);
    let j2cfg = J2Config::earth();
    let plain = solve_linkage(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg).unwrap();
    let err_of =
        |r1: f64, r2: f64| ((r1 - sc.truth.rho1).powi(2) + (r2 - sc.truth.rho2).powi(2)).sqrt();
    let plain_err = plain
        .solutions
        .iter()
        .filter(|s| s.rho1 > 0.0 && s.rho2 > 0.0)
        .map(|s| err_of(s.rho1, s.rho2))
        .fold(f64::INFINITY, f64::min);
    let out = j2_linkage(&sc.a1, &sc.a2, &sc.o1, &sc.o2, &cfg, &j2cfg).unwrap();
    let mut best = f64::INFINITY;
    for seed in &out.seeds {
        assert!(seed.iterations <= 20);
        if seed.converged {
            if let Some(sol) = &seed.solution {
                best = best.min(err_of(sol.raw.rho1, sol.raw.rho2));
            }
        }
    }
    assert!(best.is_finite(), "no converged J2 solution");
    assert!(
        best / out.rho_scale < 1e-4,
        "converged scaled error {:e}",
        best / out.rho_scale
    );
    assert!(
        best * 5.0 < plain_err,
        "improvement only {:.1}x",
        plain_err / best
    );
    println!(
        "ACCEPTANCE 8 PASS: J2 = 0 identity; converged error {:.3} km ({:.0}x better, <= 20 iterations)",
        best,
        plain_err / best
    );
}

#[test]
fn criterion_9_prefilter_oracle() {
    let mut rng = StdRng::seed_from_u64(1515);
    let mut disagreements = 0;
    for _ in 0..1000 {
        let q = random_conic(&mut rng);
        let lo = rng.gen_range(0.2..1.5);
        let hi = lo + rng.gen_range(0.3..2.0);
        let range = RangeBox::new(lo, hi).unwrap();
        let decision = accept_pair(&q, &range);
        if decision.fail_open {
            continue;
        }
        let oracle = sweep_oracle(&q, &range, 10_000);
        if decision.accept != oracle {
            let band = 1e-9 * hi;
            let wider = sweep_oracle(&q, &RangeBox::new(lo - band, hi + band).unwrap(), 10_000);
            let narrower = sweep_oracle(&q, &RangeBox::new(lo + band, hi - band).unwrap(), 10_000);
            if wider == narrower && wider == oracle {
                disagreements += 1;
            }
        }
    }
    assert_eq!(disagreements, 0);

    let mut rng = StdRng::seed_from_u64(1616);
    for _ in 0..1000 {
        let q = random_conic(&mut rng);
        let lo = rng.gen_range(0.3..1.5);
        let hi = lo + rng.gen_range(0.3..1.5);
        let inner = accept_pair(&q, &RangeBox::new(lo, hi).unwrap());
        let outer = accept_pair(
            &q,
            &RangeBox::new(
                lo - rng.gen_range(0.05..lo - 0.01),
                hi + rng.gen_range(0.1..2.0),
            )
            .unwrap(),
        );
        assert!(!inner.accept || outer.accept, "monotonicity violated");
    }
    println!("ACCEPTANCE 9 PASS: zero robust sweep-oracle disagreements, 1000 nested-box monotonicity trials");
}

fn random_conic(rng: &mut StdRng) -> arclink::linkage::ConicQ {
    let mk = |q20: f64, q10: f64, q02: f64, q01: f64, q00: f64| arclink::linkage::ConicQ {
        q20,
        q10,
        q02,
        q01,
        q00,
        crit: None,
    };
    if rng.gen_bool(0.4) {
        let cx = rng.gen_range(-0.5..3.5);
        let cy = rng.gen_range(-0.5..3.5);
        let a = rng.gen_range(0.05..2.0);
        let b = if rng.gen_bool(0.5) {
            a
        } else {
            rng.gen_range(0.05..2.0)
        };
        let q20 = 1.0 / (a * a);
        let q02 = 1.0 / (b * b);
        mk(
            q20,
            -2.0 * cx * q20,
            q02,
            -2.0 * cy * q02,
            cx * cx * q20 + cy * cy * q02 - 1.0,
        )
    } else {
        mk(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }
}

fn sweep_oracle(q: &arclink::linkage::ConicQ, range: &RangeBox, n: usize) -> bool {
    let roots = |a: f64, b: f64, c: f64| -> Vec<f64> {
        if a.abs() < 1e-300 {
            if b.abs() < 1e-300 {
                return Vec::new();
            }
            return vec![-c / b];
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let s = disc.sqrt();
        vec![(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)]
    };
    let (lo, hi) = (range.rho_min, range.rho_max);
    for k in 0..=n {
        let t = lo + (hi - lo) * k as f64 / n as f64;
        for y in roots(q.q02, q.q01, q.q20 * t * t + q.q10 * t + q.q00) {
            if (lo..=hi).contains(&y) {
                return true;
            }
        }
        for x in roots(q.q20, q.q10, q.q02 * t * t + q.q01 * t + q.q00) {
            if (lo..=hi).contains(&x) {
                return true;
            }
        }
    }
    false
}

// keep the theorem-content tests honest about what they exercised
#[test]
fn acceptance_suite_lists_every_criterion() {
    // criteria 1-9 live here; criterion 10 (real-data integration) is
    // data-gated in the CLI crate's acceptance_data test
    let here = include_str!("acceptance.rs");
    for k in 1..=9 {
        assert!(
            here.contains(&format!("ACCEPTANCE {k} PASS")),
            "criterion {k} missing"
        );
    }
}

use riskscale::claims::{ClaimDistribution, RiskModel};
use riskscale::policy::{
    expo_ci, expo_pure, optimize_matrix, PolicyIngredients, PolicyParams,
};
use riskscale::scale::ScaleBasis;
use riskscale::approx::{fit_exponential_model, ApproxKind};

fn hyperexp2() -> RiskModel {
    let claims =
        ClaimDistribution::hyperexponential_from_density(&[2.0 / 3.0, 2.0 / 3.0], &[1.0, 2.0])
            .unwrap();
    RiskModel::from_loading(1.0, 1.0, claims).unwrap()
}

fn hyperexp3() -> RiskModel {
    let claims = ClaimDistribution::hyperexponential_from_density(
        &[12.0 / 83.0, 42.0 / 83.0, 150.0 / 83.0],
        &[1.0, 2.0, 3.0],
    )
    .unwrap();
    RiskModel::new(1.0, 1.0, claims).unwrap()
}

fn f3_family(eps: f64) -> RiskModel {
    let claims =
        ClaimDistribution::hyperexponential_from_density(&[1.0, eps], &[1.0, 2.0]).unwrap();
    RiskModel::from_loading(1.0, 1.0, claims).unwrap()
}

fn f2_family(eps: f64) -> RiskModel {
    let claims = ClaimDistribution::hyperexponential_from_density(
        &[12.0 / 83.0, eps * 42.0 / 83.0, eps * 150.0 / 83.0],
        &[1.0, 2.0, 3.0],
    )
    .unwrap();
    RiskModel::from_loading(263.0 / 235.0, 1.0, claims).unwrap()
}

fn main() {
    let t0 = std::time::Instant::now();
    // ---- hyperexp-2 policy (exact + approx) ----
    let params = PolicyParams::new(0.1, 1.5, 0.0).unwrap();
    let m2 = hyperexp2();
    let exact = optimize_matrix(&m2, &params).unwrap();
    println!("h2 exact: J0={:.6} a={:.6} b={:.6}  [5.95034 3.9669 1.41036]", exact.j0, exact.a_star, exact.b_star);
    let pure = expo_pure(&m2, &params).unwrap();
    println!("h2 pure:  J0={:.6} a={:.6} b={:.6}  [5.99151 3.99434 1.46188]", pure.j0, pure.a_star, pure.b_star);
    let ci = expo_ci(&m2, &params).unwrap();
    println!("h2 ci:    J0={:.6} a={:.6} b={:.6}  [6.26009 4.17339 1.25374]", ci.j0, ci.a_star, ci.b_star);
    // CI formula evaluated at the exact optimizer
    let ing = PolicyIngredients::for_model(&m2, 0.1).unwrap();
    println!(
        "h2 ci-at-exact-opt: {:.6}  (exact J0 5.95034)",
        ing.j0_value(&params, 3.9669, 1.41036).unwrap()
    );

    // theta = 0.1 coincidence
    let m2_low = RiskModel::from_loading(
        0.1,
        1.0,
        ClaimDistribution::hyperexponential_from_density(&[2.0 / 3.0, 2.0 / 3.0], &[1.0, 2.0])
            .unwrap(),
    )
    .unwrap();
    let exact_low = optimize_matrix(&m2_low, &params).unwrap();
    let ci_low = expo_ci(&m2_low, &params).unwrap();
    println!(
        "h2 theta=0.1: exact (J0={:.6}, b={:.6}) ci (J0={:.6}, b={:.6})  [1.30271 b=0 coincide]",
        exact_low.j0, exact_low.b_star, ci_low.j0, ci_low.b_star
    );

    // ---- hyperexp-3 ----
    let q3 = 5.0 / 48.0;
    let params3 = PolicyParams::new(q3, 1.5, 0.0).unwrap();
    let m3 = hyperexp3();
    let exact3 = optimize_matrix(&m3, &params3).unwrap();
    println!("h3 exact: J0={:.6} a={:.6} b={:.6}  [3.7747 2.51647 0.709355]", exact3.j0, exact3.a_star, exact3.b_star);
    let pure3 = expo_pure(&m3, &params3).unwrap();
    println!("h3 pure:  J0={:.6}  [3.76883]", pure3.j0);
    let ci3 = expo_ci(&m3, &params3).unwrap();
    println!("h3 ci:    J0={:.6}  [4.11784]", ci3.j0);
    for (k, exp_j, exp_b) in [(1.0, 5.07857, 0.0), (2.0, 3.31174, 1.08108), (10000.0, 1.99869, 1.89722)] {
        let p = PolicyParams::new(q3, k, 0.0).unwrap();
        let s = optimize_matrix(&m3, &p).unwrap();
        println!("h3 k={k}: J0={:.6} b={:.6}  [{exp_j} {exp_b}]", s.j0, s.b_star);
    }
    let basis3 = ScaleBasis::build(&m3, q3).unwrap();
    let bdef3 = basis3.de_finetti_barrier();
    let ing3 = PolicyIngredients::for_model(&m3, q3).unwrap();
    println!("h3 J_DeF={:.6} at b={:.6}  [1.99847 1.89732]", ing3.de_finetti_value(bdef3), bdef3);

    // ---- oscillating ----
    let osc = RiskModel::from_loading(
        1.0,
        1.0,
        ClaimDistribution::damped_cosine(1.0, 2.0, 20.0).unwrap(),
    )
    .unwrap();
    let basis_osc = ScaleBasis::build(&osc, 0.1).unwrap();
    println!(
        "osc: phi={:.7} bdef={:.5}  [0.0881484 4.38201]",
        basis_osc.phi_q(),
        basis_osc.de_finetti_barrier()
    );
    for kind in ApproxKind::ALL {
        let fitted = fit_exponential_model(&osc, kind).unwrap();
        let b = ScaleBasis::build(&fitted, 0.1).unwrap();
        println!(
            "osc {}: phi={:.7} bdef={:.5}",
            kind.label(),
            b.phi_q(),
            b.de_finetti_barrier()
        );
    }

    // ---- eps families ----
    for eps in [0.001, 1.0, 1000.0] {
        let m = f3_family(eps);
        let s = optimize_matrix(&m, &params).unwrap();
        let p = expo_pure(&m, &params).unwrap();
        println!("f3 eps={eps}: exact={:.5} pure={:.5}", s.j0, p.j0);
    }
    println!("expected f3: [7.1879, 5.95034, 3.6025] pure [7.18802, 5.99151, 3.60208]");
    for eps in [0.001, 1.0, 1000.0] {
        let m = f2_family(eps);
        let p3 = PolicyParams::new(5.0 / 48.0, 1.5, 0.0).unwrap();
        let s = optimize_matrix(&m, &p3).unwrap();
        let p = expo_pure(&m, &p3).unwrap();
        println!("f2 eps={eps}: exact={:.5} pure={:.5}", s.j0, p.j0);
    }
    println!("expected f2: [7.95508, 3.7747, 3.0508] pure [7.95771, 3.76883, 3.05678]");
    println!("elapsed: {:.2?}", t0.elapsed());
}

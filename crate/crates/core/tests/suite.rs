use moduli_core::suite::{full_suite, SuiteOptions};
use moduli_core::{
    find_central_rep, AlgebraElement, GroupId, KuranishiChart, LieContext, RepStrategy, Tolerances,
};

fn chart(
    group: GroupId,
    genus: usize,
    x: &[f64],
    twist: usize,
    strategy: RepStrategy,
    seed: u64,
) -> KuranishiChart {
    let ctx = LieContext::new(group);
    let mut rng = moduli_core::rng::stream(seed, "test.rep");
    let rep = find_central_rep(
        &ctx,
        genus,
        &AlgebraElement::from_slice(x),
        twist,
        strategy,
        &Tolerances::default(),
        &mut rng,
    )
    .unwrap();
    KuranishiChart::new(rep, seed).unwrap()
}

fn assert_suite(chart: &KuranishiChart) {
    let results = full_suite(
        chart,
        &Tolerances::default(),
        SuiteOptions {
            samples: 40,
            taylor_cocycles: 10,
            seed: 3,
        },
    );
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.to_string())
        .collect();
    for r in &results {
        println!("{r}");
    }
    assert!(failed.is_empty(), "failed checks:\n{}", failed.join("\n"));
}

#[test]
fn trivial_su2_genus2() {
    assert_suite(&chart(
        GroupId::SU2,
        2,
        &[0.0; 3],
        0,
        RepStrategy::Trivial,
        1,
    ));
}

#[test]
fn pauli_su2() {
    assert_suite(&chart(
        GroupId::SU2,
        1,
        &[0.0; 3],
        1,
        RepStrategy::PauliGenus1,
        1,
    ));
}

#[test]
fn random_su2_minus_identity_genus2() {
    assert_suite(&chart(
        GroupId::SU2,
        2,
        &[0.0; 3],
        1,
        RepStrategy::RandomPolish,
        5,
    ));
}

#[test]
fn random_su2_identity_genus2() {
    assert_suite(&chart(
        GroupId::SU2,
        2,
        &[0.0; 3],
        0,
        RepStrategy::RandomPolish,
        6,
    ));
}

#[test]
fn diagonal_su2_genus2() {
    assert_suite(&chart(
        GroupId::SU2,
        2,
        &[0.0; 3],
        0,
        RepStrategy::Diagonal,
        2,
    ));
}

#[test]
fn diagonal_u2_genus2() {
    assert_suite(&chart(
        GroupId::U2,
        2,
        &[0.0; 4],
        0,
        RepStrategy::Diagonal,
        2,
    ));
}

#[test]
fn u1_genus2() {
    assert_suite(&chart(GroupId::U1, 2, &[0.0], 0, RepStrategy::Diagonal, 4));
}

#[test]
fn random_u2_half_turn_genus2() {
    assert_suite(&chart(
        GroupId::U2,
        2,
        &[std::f64::consts::PI, 0.0, 0.0, 0.0],
        0,
        RepStrategy::RandomPolish,
        7,
    ));
}

mod oracles;

use greenroute::fixtures;
use greenroute::lp::solve_lp;
use greenroute::scalar::{ratio, Rational};
use greenroute::toca::{alg_mcf, alg_mcf_pp, build_toca_lp, routes_all_arc_commodities};
use oracles::{arc_commodities_routable, random_network, rng, NetShape};
use rand::Rng;

#[test]
fn single_arc_rounds_up() {
    let net = fixtures::single_arc();
    let r = alg_mcf::<f64>(&net, &ratio(1, 2)).unwrap();
    assert_eq!(r.activation.counts(), &[3]);
    assert!((r.lp_value - 2.5).abs() < 1e-9);
    let pp = alg_mcf_pp::<f64>(&net, &ratio(1, 2)).unwrap();
    assert_eq!(pp.activation.counts(), &[3]);
    let high = alg_mcf::<Rational>(&net, &ratio(9999, 10000)).unwrap();
    assert_eq!(high.activation.counts(), &[5]);
}

#[test]
fn diamond_needs_every_arc() {
    let net = fixtures::diamond();
    let r = alg_mcf::<f64>(&net, &ratio(1, 2)).unwrap();
    assert_eq!(r.activation.counts(), &[1, 1, 1, 1]);
    let pp = alg_mcf_pp::<f64>(&net, &ratio(1, 2)).unwrap();
    assert_eq!(pp.activation.value(), 4);
}

#[test]
fn integral_relaxation_needs_no_resolve() {
    // Demand 2 on a unit-capacity arc: the relaxation is already integral.
    let net = fixtures::single_arc();
    let lp = build_toca_lp::<Rational>(&net, &ratio(2, 5)).unwrap();
    assert_eq!(solve_lp(&lp.model).unwrap().objective, ratio(2, 1));
    let mcf = alg_mcf::<Rational>(&net, &ratio(2, 5)).unwrap();
    let pp = alg_mcf_pp::<Rational>(&net, &ratio(2, 5)).unwrap();
    assert_eq!(pp.resolves, 0);
    assert_eq!(mcf.activation, pp.activation);
}

#[test]
fn random_instances_keep_guarantees() {
    let mut r = rng(21);
    for _ in 0..25 {
        let mut shape = NetShape::small(5, 9, 3);
        shape.duplex = r.gen_bool(0.3);
        let net = random_network(&mut r, &shape);
        let rho = [ratio(3, 10), ratio(1, 2), ratio(7, 10)][r.gen_range(0..3)].clone();
        let mcf = alg_mcf::<f64>(&net, &rho).unwrap();
        let pp = alg_mcf_pp::<f64>(&net, &rho).unwrap();
        assert!(pp.activation.value() <= mcf.activation.value());
        assert!(mcf.activation.value() as f64 >= mcf.lp_value - 1e-6);
        for act in [&mcf.activation, &pp.activation] {
            assert!(arc_commodities_routable(&net, &rho, act.counts()));
            assert!(routes_all_arc_commodities::<Rational>(&net, &rho, act).unwrap());
            for a in net.arcs() {
                assert!(act.count(a.id) <= a.mu);
            }
        }
        let exact = alg_mcf_pp::<Rational>(&net, &rho).unwrap();
        assert!(arc_commodities_routable(
            &net,
            &rho,
            exact.activation.counts()
        ));
    }
}

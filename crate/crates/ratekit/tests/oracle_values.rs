//! Pinned numerical values, frozen from an independent reference
//! implementation before this library was written. Closed-form outputs are
//! held to 1e-12 relative; values that pass through the bisection or the
//! interference tail are held to 1e-9; values frozen from rounded prints
//! carry the tolerance of their recorded precision.

use approx::{assert_abs_diff_eq, assert_relative_eq};

use ratekit::coding::{
    effective_top_rate, rate_fixed_point, rate_sequence, relay_bound_check, RelayScheme,
};
use ratekit::mimo::{
    c_of_beta, c_of_x, cutset_rate_asymptotic, optimal_quantization, qf_rate_asymptotic,
    QmfChannelSpec,
};
use ratekit::model::{
    interference_power_bound, interference_power_dominant, interference_power_exact,
    optimal_snr_multihop, optimal_snr_single_stage, reuse_factor, tin_condition_holds,
    GridNetwork,
};
use ratekit::multihop::multihop_sum_rate_lower;
use ratekit::schemes::{
    approx_sum_rate, best_sum_rate, optimal_stage_count_m2, original_hc_baseline, single_stage_sum_rate,
    slot_budget, slot_budget_recursive, ConstantVariant, HierMethod,
};
use ratekit::RateError;

const QMF: RelayScheme = RelayScheme::QmfOptimal;
const QF: RelayScheme = RelayScheme::Qf;
const DERIVATION: ConstantVariant = ConstantVariant::Derivation;
const THEOREM3: ConstantVariant = ConstantVariant::Theorem3;

#[test]
fn array_rate_function_values() {
    let pins = [
        (1e-13, 1.442695040888819e-13),
        (1e-12, 1.44298346864343e-12),
        (0.5, 0.5133996558224083),
        (1.0, 0.8374233570425701),
        (10.0, 2.7233264657365006),
        (100.0, 5.482606861401836),
        (1016.17, 8.63604002942282),
        (2032.0, 9.609645206307716),
        (1e6, 18.491758197289695),
        (1e300, 995.1357334253198),
    ];
    for (x, want) in pins {
        assert_relative_eq!(c_of_x(x).unwrap(), want, max_relative = 1e-12);
    }
}

#[test]
fn partial_array_rate_function_values() {
    let pins = [
        (10.0, 0.1, 0.3398473269869247),
        (10.0, 0.25, 0.825434673970878),
        (10.0, 0.5, 1.5626635279558996),
        (10.0, 0.75, 2.197757141519507),
        (10.0, 0.9, 2.5261251241247216),
        (1.0, 0.5, 0.4569990373245942),
        (100.0, 0.5, 3.114729931356153),
        (1000.0, 0.3, 2.917745662184674),
        (2033.0, 0.5, 5.274058671213544),
    ];
    for (snr, beta, want) in pins {
        assert_relative_eq!(c_of_beta(snr, beta).unwrap(), want, max_relative = 1e-12);
    }
    // endpoints reduce to the full-array function and to zero
    assert_relative_eq!(
        c_of_beta(10.0, 1.0).unwrap(),
        c_of_x(10.0).unwrap(),
        max_relative = 1e-14
    );
    assert_eq!(c_of_beta(10.0, 0.0).unwrap(), 0.0);
}

#[test]
fn relaying_rates_and_optimal_distortion() {
    let spec = QmfChannelSpec::new(4.0, 1.0, 100.0).unwrap();
    assert_relative_eq!(
        qf_rate_asymptotic(&spec),
        2.999259007325116,
        max_relative = 1e-12
    );
    assert_eq!(cutset_rate_asymptotic(&spec), 4.0);
    let (level, rate) = optimal_quantization(&spec, 1e-9).unwrap();
    assert_relative_eq!(rate, 3.6307485124359964, max_relative = 1e-9);
    assert_relative_eq!(
        level.unwrap().sigma_q2,
        3.4283853861250844,
        max_relative = 1e-9
    );

    // generous backhaul saturates at the full-array rate
    let spec = QmfChannelSpec::new(30.0, 1.0, 100.0).unwrap();
    let (_, rate) = optimal_quantization(&spec, 1e-9).unwrap();
    assert_relative_eq!(rate, 5.482606807040206, max_relative = 1e-9);

    let spec = QmfChannelSpec::new(8.0, 1.0, 1e6).unwrap();
    let (_, rate) = optimal_quantization(&spec, 1e-9).unwrap();
    assert_relative_eq!(rate, 7.999071769129329, max_relative = 1e-9);

    // zero backhaul is degenerate: no level, zero rate
    let spec = QmfChannelSpec::new(0.0, 1.0, 100.0).unwrap();
    let (level, rate) = optimal_quantization(&spec, 1e-9).unwrap();
    assert!(level.is_none());
    assert_eq!(rate, 0.0);
}

#[test]
fn reuse_factors_at_optimal_power() {
    for (alpha, want) in [(3.0, 7), (4.0, 6), (7.0, 5)] {
        let snr = optimal_snr_single_stage(alpha).unwrap();
        assert_eq!(reuse_factor(snr, alpha).unwrap(), want);
    }
    for (alpha, want) in [(4.0, 4), (7.0, 4)] {
        let snr = optimal_snr_multihop(alpha).unwrap();
        assert_eq!(reuse_factor(snr, alpha).unwrap(), want);
    }
}

#[test]
fn interference_ring_bound_values() {
    let cases = [
        (3.0, 7, 10_000u64, 1397.5910985543214),
        (3.0, 7, 1_000_000, 1402.993885771208),
        (4.0, 6, 10_000, 2758.8059022168113),
        (4.0, 6, 1_000_000, 2758.86386955345),
        (7.0, 5, 10_000, 37860.17518737703),
    ];
    for (alpha, l, n, want) in cases {
        let snr = optimal_snr_single_stage(alpha).unwrap();
        let b = interference_power_bound(n, snr, l, alpha).unwrap();
        assert_relative_eq!(b.p_i, want, max_relative = 1e-9);
    }
    let cases = [(4.0, 4, 379.4285476463146), (7.0, 4, 258.20150051328795)];
    for (alpha, l, want) in cases {
        let snr = optimal_snr_multihop(alpha).unwrap();
        let b = interference_power_bound(10_000, snr, l, alpha).unwrap();
        assert_relative_eq!(b.p_i, want, max_relative = 1e-9);
    }
}

#[test]
fn dominant_ring_share_of_full_bound() {
    let pins = [
        (5.0, 0.953287),
        (6.0, 0.982719),
        (7.0, 0.992636),
        (9.0, 0.998607),
        (11.0, 0.999729),
    ];
    for (alpha, want) in pins {
        let snr = optimal_snr_single_stage(alpha).unwrap();
        let l = reuse_factor(snr, alpha).unwrap();
        let full = interference_power_bound(10_000, snr, l, alpha).unwrap().p_i;
        let dom = interference_power_dominant(snr, l, alpha).unwrap().p_i;
        assert_abs_diff_eq!(dom / full, want, epsilon = 1e-5);
    }
}

#[test]
fn exact_grid_interference_values() {
    let grid = GridNetwork::new(10_000).unwrap();
    let s7 = optimal_snr_single_stage(7.0).unwrap();
    let s3 = optimal_snr_single_stage(3.0).unwrap();
    // reuse spacing beyond the co-active horizon: nothing interferes
    assert_eq!(
        interference_power_exact(&grid, 5, 7.0, s7, 20).unwrap().p_i,
        0.0
    );
    assert_relative_eq!(
        interference_power_exact(&grid, 5, 7.0, s7, 5).unwrap().p_i,
        9387.873138253897,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        interference_power_exact(&grid, 7, 3.0, s3, 5).unwrap().p_i,
        495.2940798344801,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        interference_power_exact(&grid, 7, 3.0, s3, 2).unwrap().p_i,
        618.0373811283478,
        max_relative = 1e-9
    );
}

#[test]
fn tin_holds_at_reuse_factor() {
    for alpha in [2.5, 3.0, 4.0, 5.0, 7.0, 9.0, 11.0] {
        let snr = optimal_snr_single_stage(alpha).unwrap();
        let l = reuse_factor(snr, alpha).unwrap();
        let check = tin_condition_holds(snr, l, alpha).unwrap();
        assert!(check.holds, "alpha={alpha}");
        assert!(check.margin_db >= 0.0);
    }
}

fn assert_chain(got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        // reference chain prints carry nine decimals
        assert_abs_diff_eq!(g, w, epsilon = 1e-8);
    }
}

#[test]
fn coding_rate_chains() {
    let seq = rate_sequence(7.0, 1, QMF, 9).unwrap();
    assert_relative_eq!(seq.rates[0], 10.990008511760603, max_relative = 1e-9);
    assert_relative_eq!(seq.rates[4], 7.516530595162817, max_relative = 1e-9);
    assert_chain(
        &seq.rates,
        &[
            10.990008512,
            9.149221852,
            8.375962007,
            7.880806356,
            7.516530595,
            7.228593979,
            6.990706221,
            6.788167517,
            6.611923415,
        ],
    );
    let seq = rate_sequence(7.0, 1, QF, 9).unwrap();
    assert_chain(
        &seq.rates,
        &[
            10.990008512,
            8.636057609,
            7.088098089,
            5.792134716,
            4.667517261,
            3.707688299,
            2.916934999,
            2.289947987,
            1.808099988,
        ],
    );
    let seq = rate_sequence(7.0, 2, QMF, 5).unwrap();
    assert_chain(
        &seq.rates,
        &[
            10.990008512,
            9.609979462,
            9.608441108,
            9.608437257,
            9.608437247,
        ],
    );
    let seq = rate_sequence(3.0, 2, QMF, 9).unwrap();
    assert_relative_eq!(seq.rates[0], 4.277240645240631, max_relative = 1e-9);
    assert_chain(
        &seq.rates,
        &[
            4.277240645,
            3.361653484,
            3.283400591,
            3.271269645,
            3.269277122,
            3.268946868,
            3.268892048,
            3.268882946,
            3.268881435,
        ],
    );
}

#[test]
fn top_stage_rate_is_interference_free() {
    let snr = optimal_snr_single_stage(7.0).unwrap();
    let top = effective_top_rate(7.516530595162817, 1, snr, QMF).unwrap();
    assert_relative_eq!(top, 7.516522092423177, max_relative = 1e-9);
}

#[test]
fn chain_limits() {
    let pins = [
        (3.0, 3.268881134009333),
        (4.0, 4.963670727944476),
        (5.0, 7.236053953178158),
        (6.0, 7.652424649123384),
        (7.0, 9.608437247072882),
        (8.0, 11.584055759783457),
        (9.0, 13.571093156999922),
        (10.0, 15.56435170203563),
        (11.0, 17.56088798501805),
    ];
    let mut prev = 0.0;
    for (alpha, want) in pins {
        let r = rate_fixed_point(alpha, 2, QMF, 1e-9).unwrap();
        assert_relative_eq!(r, want, max_relative = 1e-9);
        assert!(r > prev, "limit must increase with alpha");
        prev = r;
    }
    assert_relative_eq!(
        rate_fixed_point(7.0, 2, QF, 1e-9).unwrap(),
        9.605525107020584,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        rate_fixed_point(3.0, 2, QF, 1e-9).unwrap(),
        3.138706981614774,
        max_relative = 1e-9
    );
}

#[test]
fn fixed_point_close_to_fifth_iterate() {
    // worst gap on the alpha grid; holds within 1e-3 (not 1e-6)
    let seq = rate_sequence(3.0, 2, QMF, 5).unwrap();
    let r_star = rate_fixed_point(3.0, 2, QMF, 1e-9).unwrap();
    let gap = (seq.rates[4] - r_star).abs();
    assert!(gap < 1e-3, "gap={gap:.3e}");
    assert!(gap > 1e-6, "the recorded slack is real, not rounding");
}

#[test]
fn one_step_relay_margins() {
    let check = relay_bound_check(7.0, 1).unwrap();
    assert!(check.pass);
    assert_abs_diff_eq!(check.margin_qmf, 1.840787, epsilon = 1e-5);
    assert_abs_diff_eq!(check.margin_qf, 2.353951, epsilon = 1e-5);
    let check = relay_bound_check(7.0, 16).unwrap();
    assert!(check.pass);
    assert_abs_diff_eq!(check.margin_qmf, 1.379762, epsilon = 1e-5);
    assert_abs_diff_eq!(check.margin_qf, 1.379762, epsilon = 1e-5);
}

#[test]
fn relaying_gap_ratio_grows() {
    let rq = rate_sequence(7.0, 1, QMF, 10).unwrap().rates;
    let rf = rate_sequence(7.0, 1, QF, 10).unwrap().rates;
    let want = [
        1.2788, 1.4927, 1.6718, 1.8202, 1.9361, 2.0186, 2.0705, 2.0972, 2.1053,
    ];
    let mut prev = 0.0;
    for (t, w) in (1..10).zip(want) {
        let ratio = (rq[0] - rf[t]) / (rq[0] - rq[t]);
        assert_abs_diff_eq!(ratio, w, epsilon = 1e-3);
        assert!(ratio > prev);
        prev = ratio;
    }
}

#[test]
fn single_stage_values() {
    let b = single_stage_sum_rate(10_000, 3.0, None, None, 1).unwrap();
    assert_relative_eq!(b.sum_rate, 21.629975824151032, max_relative = 1e-9);
    assert_relative_eq!(b.coding_rate, 4.282516723004318, max_relative = 1e-9);
    assert_relative_eq!(b.packet_throughput, 5.050762722761053, max_relative = 1e-12);
    assert_eq!(b.cluster_sizes, vec![10]);

    let b = single_stage_sum_rate(10_000, 7.0, None, None, 1).unwrap();
    assert_relative_eq!(b.sum_rate, 77.71109543967987, max_relative = 1e-9);
    assert_relative_eq!(b.packet_throughput, 7.071067811865475, max_relative = 1e-12);
    assert_eq!(b.cluster_sizes, vec![14]);

    let b = single_stage_sum_rate(100, 7.0, None, None, 1).unwrap();
    assert_relative_eq!(b.sum_rate, 7.771109911726955, max_relative = 1e-9);
}

#[test]
fn approximate_single_stage_formula() {
    assert_relative_eq!(
        approx_sum_rate(10_000, 7.0).unwrap(),
        97.5933550309845,
        max_relative = 1e-12
    );
    for alpha in [3.0, 4.0, 7.0, 11.0] {
        let exact = single_stage_sum_rate(10_000, alpha, None, None, 1)
            .unwrap()
            .sum_rate;
        let ratio = approx_sum_rate(10_000, alpha).unwrap() / exact;
        assert!((1.0..=1.35).contains(&ratio), "alpha={alpha} ratio={ratio}");
    }
}

#[test]
fn best_rate_headline_points() {
    let b = best_sum_rate(HierMethod::M4, 100_000, 7.0, QMF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 705.8688511512922, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (5, 1));
    assert_eq!(b.relay_scheme, Some(QMF));

    let b = best_sum_rate(HierMethod::M4, 100_000, 7.0, QF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 439.4660767157169, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (3, 1));

    let b = best_sum_rate(HierMethod::M2, 100_000, 7.0, QMF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 384.24208653101374, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (2, 1));

    for method in [HierMethod::M1, HierMethod::M3] {
        let b = best_sum_rate(method, 100_000, 7.0, QMF, DERIVATION).unwrap();
        assert_relative_eq!(b.sum_rate, 245.74406105598007, max_relative = 1e-9);
        assert_eq!((b.t_used, b.q_used), (1, 1));
    }

    let b = best_sum_rate(HierMethod::M4, 10_000, 7.0, QMF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 111.36440073696926, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (3, 1));

    let b = best_sum_rate(HierMethod::M2, 10_000, 7.0, QMF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 82.7824480592649, max_relative = 1e-9);

    let b = best_sum_rate(HierMethod::M4, 10_000, 4.0, QMF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 40.30824946907399, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (2, 1));

    let b = best_sum_rate(HierMethod::M4, 100_000, 4.0, QMF, DERIVATION).unwrap();
    assert_relative_eq!(b.sum_rate, 220.60131490338748, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (4, 1));
}

#[test]
fn best_rate_alternative_constants() {
    let b = best_sum_rate(HierMethod::M4, 100_000, 7.0, QMF, THEOREM3).unwrap();
    assert_relative_eq!(b.sum_rate, 942.2218743339606, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (5, 1));
    let b = best_sum_rate(HierMethod::M4, 100_000, 7.0, QF, THEOREM3).unwrap();
    assert_relative_eq!(b.sum_rate, 569.9169912122367, max_relative = 1e-9);
    assert_eq!((b.t_used, b.q_used), (3, 1));
}

#[test]
fn fixed_reuse_baseline_values() {
    let b = original_hc_baseline(100_000, 7.0).unwrap();
    assert_relative_eq!(b.sum_rate, 77.3342562409114, max_relative = 1e-9);
    assert_eq!(b.t_used, 2);
    assert_eq!(b.relay_scheme, Some(QF));

    let b = original_hc_baseline(100_000, 4.0).unwrap();
    assert_relative_eq!(b.sum_rate, 23.478961521555178, max_relative = 1e-9);
    assert_eq!(b.t_used, 2);

    let b = original_hc_baseline(10_000, 7.0).unwrap();
    assert_relative_eq!(b.sum_rate, 16.66116043732342, max_relative = 1e-9);

    assert!(matches!(
        original_hc_baseline(1_000, 7.0),
        Err(RateError::Infeasible(_))
    ));
}

#[test]
fn stage_count_closed_form() {
    let est = optimal_stage_count_m2(10_000_000, 5).unwrap();
    assert_relative_eq!(est.t_real, 3.3090743535583726, max_relative = 1e-12);
    assert_eq!(est.t_int, 3);
    assert!(optimal_stage_count_m2(4, 5).is_err());
}

#[test]
fn multihop_lower_bound_values() {
    let pins = [
        (7.0, 1_000u64, 7.990930669463453),
        (7.0, 10_000, 25.269541536003505),
        (7.0, 100_000, 79.90930668196378),
        (4.0, 1_000, 3.3090909009933314),
        (4.0, 10_000, 10.463721801166761),
        (4.0, 100_000, 33.08902825103175),
    ];
    for (alpha, n, want) in pins {
        let b = multihop_sum_rate_lower(n, alpha).unwrap();
        assert_relative_eq!(b.sum_rate, want, max_relative = 1e-9);
    }
}

#[test]
fn slot_budget_spot_values() {
    let closed = slot_budget(HierMethod::M3, 1e4, 2, 5, 2).unwrap();
    assert_relative_eq!(closed.f_t, 14142135.623730952, max_relative = 1e-12);
    let rec = slot_budget_recursive(HierMethod::M3, 1e4, 2, 5, 2).unwrap();
    assert_relative_eq!(rec.f_t, closed.f_t, max_relative = 1e-9);

    // the m2 two-stage optimal subcluster size is sqrt(n/(1+q))-shaped
    let b = slot_budget(HierMethod::M2, 1e4, 2, 3, 2).unwrap();
    assert_relative_eq!(
        b.cluster_sizes[0],
        100.0 / 3f64.sqrt(),
        max_relative = 1e-12
    );
    let rec = slot_budget_recursive(HierMethod::M2, 1e4, 2, 3, 2).unwrap();
    assert_relative_eq!(rec.cluster_sizes[0], b.cluster_sizes[0], max_relative = 1e-3);
}

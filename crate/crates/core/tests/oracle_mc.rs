use twohop::code_model::{exact_errors, mc_errors};
use twohop::oracle::{exhaustive_search, np_frontier, AuditScope, EncoderMode, SearchOptions};
use twohop::prob::TwoHopSource;
use twohop::schemes::{QuantizeBuilder, SchemeBuilder};
use twohop::single_letter::{AuxCoupling, TradeoffWeights};

#[test]
fn random_binary_sources_audit_clean_at_n1() {
    let w = TradeoffWeights::new(1.0, 1.0, 1.0).unwrap();
    for k in 0..5 {
        let mut rng = twohop::par::stream_rng(5, k);
        let s = twohop::sample::source(&mut rng, 2, 2, 2);
        let r = exhaustive_search(&s, 1, 2, 2, 0.25, 0.25, &w, &SearchOptions::new(1)).unwrap();
        assert_eq!(r.summary.fail_entries, 0, "source {k}: {:?}", r.failures);
    }
}

#[test]
fn best_code_profile_is_exact() {
    let s = TwoHopSource::dsbs(0.2, 0.15);
    let w = TradeoffWeights::new(0.5, 1.0, 0.5).unwrap();
    let mut opts = SearchOptions::new(2);
    opts.scope = AuditScope::None;
    let r = exhaustive_search(&s, 2, 2, 2, 0.3, 0.3, &w, &opts).unwrap();
    let code = r.best_code.expect("a feasible code");
    let p = exact_errors(&code, &s).unwrap();
    let q = r.best_profile.unwrap();
    for (a, b) in p.values().iter().zip(q.values()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(p.beta1 <= 0.3 + 1e-12 && p.eta1 <= 0.3 + 1e-12);
    let fr = np_frontier(&code, &s, 2).unwrap();
    assert!(fr.relay.iter().any(|t| (t.type1 - p.beta1).abs() < 1e-12 && (t.type2 - p.beta2).abs() < 1e-12));
}

#[test]
fn sampled_search_is_deterministic() {
    let s = TwoHopSource::dsbs(0.1, 0.1);
    let w = TradeoffWeights::new(1.0, 1.0, 1.0).unwrap();
    let mut opts = SearchOptions::new(2);
    opts.scope = AuditScope::None;
    opts.encoders = EncoderMode::Sample { count: 30, seed: 9 };
    let a = exhaustive_search(&s, 2, 2, 2, 0.2, 0.2, &w, &opts).unwrap();
    let b = exhaustive_search(&s, 2, 2, 2, 0.2, 0.2, &w, &opts).unwrap();
    assert_eq!(a.best_weighted_lhs.to_bits(), b.best_weighted_lhs.to_bits());
    assert_eq!(a.encoder_pairs, 30);
}

#[test]
fn monte_carlo_coverage_is_near_nominal() {
    let s = TwoHopSource::dsbs(0.1, 0.1);
    let b = QuantizeBuilder { aux: AuxCoupling::identity(&s), margins: (0.3, 0.3), seed: 11 };
    let code = b.build(&s, 5).unwrap();
    let exact = exact_errors(&code, &s).unwrap().values();
    let seeds = 400;
    let mut hits = [0u32; 4];
    for seed in 0..seeds {
        let iv = mc_errors(&code, &s, 20_000, 5000 + seed).unwrap().intervals.unwrap();
        for k in 0..4 {
            hits[k] += u32::from(iv[k][0] <= exact[k] && exact[k] <= iv[k][1]);
        }
    }
    // 95% nominal; 0.92 is about 2.75 standard errors below it at 400 runs
    for (k, h) in hits.iter().enumerate() {
        assert!(*h as f64 >= 0.92 * seeds as f64, "error {k}: {h} of {seeds}");
    }
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let s = TwoHopSource::dsbs(0.1, 0.1);
    let b = QuantizeBuilder { aux: AuxCoupling::identity(&s), margins: (0.3, 0.3), seed: 1 };
    let code = b.build(&s, 4).unwrap();
    let run = |t| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
        pool.install(|| mc_errors(&code, &s, 30_000, 8).unwrap())
    };
    assert_eq!(run(1).values(), run(4).values());
}

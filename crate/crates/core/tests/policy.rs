use macrogame::env::{AgentId, AgentType, ScenarioConfig};
use macrogame::error::Error;
use macrogame::policy::{
    features, load_policy, load_policy_for, save_policy, Activation, PolicyParams, PolicySpec,
    SampleMode,
};
use macrogame::seeding;
use proptest::prelude::*;
use rand::Rng;

fn central_bank_like(hidden: Vec<usize>) -> PolicySpec {
    PolicySpec {
        agent_type: AgentType::CentralBank,
        obs_dim: 8,
        hetero_dim: 0,
        action_dims: vec![5, 5, 5, 5],
        hidden,
        activation: Activation::Tanh,
    }
}

#[test]
fn parameter_count_is_closed_form() {
    let spec = central_bank_like(vec![64, 64]);
    let want = (8 * 64 + 64) + (64 * 64 + 64) + (64 * 20 + 20) + (64 + 1);
    assert_eq!(spec.param_count(), want);
    assert_eq!(PolicyParams::init(spec, 1).unwrap().len(), want);
}

#[test]
fn scenario_specs_match_observations() {
    let cfg = ScenarioConfig::heterogeneous_skills();
    for t in AgentType::ALL {
        let spec = PolicySpec::for_scenario(t, &cfg);
        assert_eq!(spec.obs_dim, t.obs_dim(2, 2));
        assert_eq!(spec.action_dims, cfg.grids.action_dims(t, 2, 2));
        let id = AgentId::new(t, 0);
        let raw = vec![1.0; spec.obs_dim];
        assert_eq!(features::policy_input(id, &raw, &cfg).len(), spec.input_dim());
    }
}

#[test]
fn batch_evaluation_reproduces_sampling() {
    let p = PolicyParams::init(central_bank_like(vec![16]), 3).unwrap();
    let mut rng = seeding::stream(&[31]);
    let mut inputs = Vec::new();
    let mut actions = Vec::new();
    let mut log_probs = Vec::new();
    for _ in 0..25 {
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s = p.act(&x, &mut rng, SampleMode::Stochastic).unwrap();
        inputs.push(x);
        actions.push(s.indices);
        log_probs.push(s.log_prob);
    }
    let batch = p.evaluate_batch(&inputs, &actions).unwrap();
    for (a, b) in batch.log_probs.iter().zip(&log_probs) {
        assert!((a - b).abs() <= 1e-10);
    }
    let one = p.evaluate_batch(&inputs[..1], &actions[..1]).unwrap();
    let single = p.evaluate(&inputs[0], &actions[0]).unwrap();
    assert_eq!(one.log_probs[0], single.log_prob);
    assert_eq!(one.entropies[0], single.entropy);
    assert_eq!(one.values[0], single.value);
    assert!(matches!(
        p.evaluate_batch(&inputs[..2], &actions[..1]),
        Err(Error::Shape { .. })
    ));
}

#[test]
fn uniform_logits_have_log_five_entropy() {
    let spec = central_bank_like(vec![4]);
    let n = spec.param_count();
    let p = PolicyParams::from_values(spec, vec![0.0; n]).unwrap();
    let e = p.evaluate(&[0.3; 8], &[0, 1, 2, 3]).unwrap();
    assert!((e.entropy - 4.0 * 5f64.ln()).abs() <= 1e-12);
    assert!((e.log_prob - 4.0 * 0.2f64.ln()).abs() <= 1e-12);
}

#[test]
fn checkpoints_round_trip_for_every_agent_type() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::heterogeneous_skills();
    for t in AgentType::ALL {
        let spec = PolicySpec::with_hidden(t, &cfg, vec![8, 8]);
        let p = PolicyParams::init(spec.clone(), t.index() as u64).unwrap();
        let path = dir.path().join(format!("{}.policy", t.name()));
        save_policy(&p, &path).unwrap();
        let back = load_policy(&path).unwrap();
        assert_eq!(
            back.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            p.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(load_policy_for(&path, &spec).unwrap(), p);

        let wider = PolicySpec::with_hidden(t, &cfg, vec![8, 9]);
        match load_policy_for(&path, &wider) {
            Err(Error::Shape { layer, .. }) => assert_eq!(layer, "hidden.1"),
            other => panic!("expected shape error, got {other:?}"),
        }
    }
}

#[test]
fn truncated_checkpoint_fails_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let p = PolicyParams::init(central_bank_like(vec![4]), 0).unwrap();
    let path = dir.path().join("p.policy");
    save_policy(&p, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(matches!(load_policy(&path), Err(Error::Checksum { .. })));
}

proptest! {
    #[test]
    fn heads_are_probability_vectors(
        seed in 0u64..1000,
        x in prop::collection::vec(-5.0f64..5.0, 8),
    ) {
        let mut p = PolicyParams::init(central_bank_like(vec![6]), seed).unwrap();
        let mut rng = seeding::stream(&[seed, 99]);
        for v in &mut p.values {
            *v += rng.random_range(-1.0..1.0);
        }
        let fwd = p.forward(&x).unwrap();
        for head in &fwd.probs {
            prop_assert!((head.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(head.iter().all(|q| *q >= 0.0));
        }
        prop_assert!(fwd.value.is_finite());
    }
}

//! Finite-difference verification of the three SAC loss heads on toy
//! networks, in f64 where central differences are sharp.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use og_core::nn::Mlp;
use og_core::sac::{critic_loss_and_grads, critic_targets, policy_loss_and_grads, SacConfig};
use og_core::sac::GaussianPolicy;

const OBS: usize = 4;
const ACT: usize = 2;
const BATCH: usize = 6;
const REL_TOL: f64 = 1e-4;

struct Toy {
    policy: GaussianPolicy<f64>,
    q1: Mlp<f64>,
    q2: Mlp<f64>,
    obs: Vec<f64>,
    critic_in: Vec<f64>,
    xi: Vec<f64>,
    targets: Vec<f64>,
}

fn toy(seed: u64) -> Toy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut policy = GaussianPolicy::new(OBS, ACT, &[6], &mut rng);
    // undo the tiny-output scaling so the head is in a generic regime
    policy.net.scale_last_layer(50.0);
    let q1 = Mlp::new(&[OBS + ACT, 5, 1], &mut rng);
    let q2 = Mlp::new(&[OBS + ACT, 5, 1], &mut rng);
    let obs: Vec<f64> = (0..BATCH * OBS).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let critic_in: Vec<f64> =
        (0..BATCH * (OBS + ACT)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let xi: Vec<f64> = (0..BATCH * ACT).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let targets: Vec<f64> = (0..BATCH).map(|_| rng.gen_range(-3.0..0.0)).collect();
    Toy { policy, q1, q2, obs, critic_in, xi, targets }
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Iterate all parameters of an MLP with a closure (layer, is_weight, index).
fn check_params(
    mlp_params: &mut Mlp<f64>,
    analytic: &og_core::nn::Gradients<f64>,
    mut loss_fn: impl FnMut(&Mlp<f64>) -> f64,
    label: &str,
) {
    let eps = 1e-6;
    for li in 0..mlp_params.layers.len() {
        for p in 0..mlp_params.layers[li].w.len() {
            let orig = mlp_params.layers[li].w[p];
            mlp_params.layers[li].w[p] = orig + eps;
            let lp = loss_fn(mlp_params);
            mlp_params.layers[li].w[p] = orig - eps;
            let lm = loss_fn(mlp_params);
            mlp_params.layers[li].w[p] = orig;
            let numeric = (lp - lm) / (2.0 * eps);
            let a = analytic.d_w[li][p];
            assert!(
                rel_err(a, numeric) < REL_TOL,
                "{label} layer {li} w[{p}]: analytic {a} vs numeric {numeric}"
            );
        }
        for p in 0..mlp_params.layers[li].b.len() {
            let orig = mlp_params.layers[li].b[p];
            mlp_params.layers[li].b[p] = orig + eps;
            let lp = loss_fn(mlp_params);
            mlp_params.layers[li].b[p] = orig - eps;
            let lm = loss_fn(mlp_params);
            mlp_params.layers[li].b[p] = orig;
            let numeric = (lp - lm) / (2.0 * eps);
            let a = analytic.d_b[li][p];
            assert!(
                rel_err(a, numeric) < REL_TOL,
                "{label} layer {li} b[{p}]: analytic {a} vs numeric {numeric}"
            );
        }
    }
}

#[test]
fn critic_loss_gradients_match_finite_differences() {
    let start = std::time::Instant::now();
    for seed in 0..4 {
        let mut t = toy(seed);
        let mut grads = t.q1.gradients();
        let mut scratch = t.q1.scratch();
        critic_loss_and_grads(&t.q1, &t.critic_in, &t.targets, BATCH, &mut scratch, &mut grads);
        let critic_in = t.critic_in.clone();
        let targets = t.targets.clone();
        check_params(
            &mut t.q1,
            &grads,
            move |q| {
                let mut s = q.scratch();
                let mut g = q.gradients();
                critic_loss_and_grads(q, &critic_in, &targets, BATCH, &mut s, &mut g)
            },
            "critic",
        );
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn policy_loss_gradients_match_finite_differences() {
    let start = std::time::Instant::now();
    for seed in 10..14 {
        let mut t = toy(seed);
        let alpha = 0.37;
        let mut g_pi = t.policy.net.gradients();
        let mut g1 = t.q1.gradients();
        let mut g2 = t.q2.gradients();
        let (_, _) = policy_loss_and_grads(
            &t.policy, &t.q1, &t.q2, &t.obs, &t.xi, alpha, BATCH, &mut g_pi, &mut g1, &mut g2,
        );
        let q1 = t.q1.clone();
        let q2 = t.q2.clone();
        let obs = t.obs.clone();
        let xi = t.xi.clone();
        let act_dim = ACT;
        let analytic = g_pi;
        // finite differences over the policy network parameters
        let eps = 1e-6;
        for li in 0..t.policy.net.layers.len() {
            let n_w = t.policy.net.layers[li].w.len();
            for p in 0..n_w {
                let orig = t.policy.net.layers[li].w[p];
                let eval = |pol: &GaussianPolicy<f64>| {
                    let mut gp = pol.net.gradients();
                    let mut ga = q1.gradients();
                    let mut gb = q2.gradients();
                    policy_loss_and_grads(
                        pol, &q1, &q2, &obs, &xi, alpha, BATCH, &mut gp, &mut ga, &mut gb,
                    )
                    .0
                };
                t.policy.net.layers[li].w[p] = orig + eps;
                let lp = eval(&t.policy);
                t.policy.net.layers[li].w[p] = orig - eps;
                let lm = eval(&t.policy);
                t.policy.net.layers[li].w[p] = orig;
                let numeric = (lp - lm) / (2.0 * eps);
                let a = analytic.d_w[li][p];
                assert!(
                    rel_err(a, numeric) < REL_TOL,
                    "policy layer {li} w[{p}]: analytic {a} vs numeric {numeric}"
                );
            }
        }
        let _ = act_dim;
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn alpha_loss_gradient_matches_finite_differences() {
    // L(log_alpha) = -log_alpha * mean(log_pi + target_entropy); the update
    // uses dL/dlog_alpha = -mean(log_pi + target_entropy)
    let t = toy(21);
    let mut g_pi = t.policy.net.gradients();
    let mut g1 = t.q1.gradients();
    let mut g2 = t.q2.gradients();
    let (_, mean_log_prob) = policy_loss_and_grads(
        &t.policy, &t.q1, &t.q2, &t.obs, &t.xi, 0.2, BATCH, &mut g_pi, &mut g1, &mut g2,
    );
    let target_entropy = -(ACT as f64);
    let loss = |log_alpha: f64| -log_alpha * (mean_log_prob + target_entropy);
    let analytic = -(mean_log_prob + target_entropy);
    let eps = 1e-6;
    let numeric = (loss(0.3 + eps) - loss(0.3 - eps)) / (2.0 * eps);
    assert!(rel_err(analytic, numeric) < REL_TOL, "alpha: {analytic} vs {numeric}");
}

#[test]
fn bellman_targets_respect_clamp_interval() {
    let t = toy(33);
    let cfg = SacConfig { r_max: 3.0, clamp_targets: true, ..SacConfig::default() };
    let rewards: Vec<f64> = (0..BATCH).map(|i| -(i as f64)).collect();
    let dones = vec![false; BATCH];
    let y = critic_targets(
        &t.policy, &t.q1, &t.q2, &t.obs, &t.xi, &rewards, &dones, 0.2, &cfg, BATCH,
    );
    let y_min = -cfg.r_max / (1.0 - cfg.gamma);
    for v in y {
        assert!(v <= 0.0 && v >= y_min);
    }
}

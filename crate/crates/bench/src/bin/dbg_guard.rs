use og_core::arm::{forward_kinematics, jacobian};
use og_core::env::{grasp_from_id, DomainParams, EnvConfig, OccludedGraspEnv};
use og_core::math::{wrap_angle, Pose2, Rot2};

fn action_towards(env: &OccludedGraspEnv, ee: Pose2, target: Pose2) -> [f64; 3] {
    let d = env.domain();
    let world_d = target.pos() - ee.pos();
    let local = Rot2::from_angle(ee.pitch).apply_inv(world_d);
    let dpitch = wrap_angle(target.pitch - ee.pitch);
    [
        (local.x / d.action_translation_scale).clamp(-1.0, 1.0),
        (local.z / d.action_translation_scale).clamp(-1.0, 1.0),
        (dpitch / d.action_rotation_scale).clamp(-1.0, 1.0),
    ]
}

fn main() {
    let mut env = OccludedGraspEnv::new(EnvConfig::default());
    let domain = DomainParams::default();
    let goal = grasp_from_id(&domain, 1.5).unwrap();
    let mut obs = env.reset(domain, goal, 1234).unwrap();
    for t in 0..16 {
        let obj = obs.object_world;
        let target = if t < 6 {
            Pose2::new(obj.x - 0.14, obj.z + 0.01, -0.1)
        } else {
            obj.compose(goal.pose_in_object)
        };
        let a = action_towards(&env, obs.ee_world, target);
        let r = env.step(a).unwrap();
        obs = r.observation;
        let scene = env.scene().unwrap();
        let st = scene.arm_state(0.07, [[-2.9, 2.9]; 3]);
        let det = jacobian(&st).det();
        let fk = forward_kinematics(&st);
        let des = env.desired_pose();
        println!(
            "t={t:2} q=({:+.2},{:+.2},{:+.2}) detJ={:+.4} ee=({:+.3},{:+.3},{:+.2}) des=({:+.3},{:+.3},{:+.2}) a=({:+.2},{:+.2},{:+.2})",
            st.q[0], st.q[1], st.q[2], det, fk.x, fk.z, fk.pitch, des.x, des.z, des.pitch, a[0], a[1], a[2]
        );
    }
}

use og_core::env::{grasp_from_id, DomainParams, EnvConfig, OccludedGraspEnv};

fn main() {
    let mut env = OccludedGraspEnv::new(EnvConfig { joint_noise_std: 0.0, ..EnvConfig::default() });
    let domain = DomainParams::default();
    let goal = grasp_from_id(&domain, 1.5).unwrap();
    env.reset(domain, goal, 0).unwrap();
    {
        let scene = env.scene_mut().unwrap();
        let obj = scene.ids.object;
        scene.world.body_mut(obj).pose.x = 50.0;
    }
    let d0 = env.desired_pose();
    for step in 0..4 {
        env.step([0.0, 0.0, 0.0]).unwrap();
        let scene = env.scene().unwrap();
        let st = scene.arm_state(0.07, [[-2.9, 2.9]; 3]);
        let ee = scene.ee_pose();
        println!(
            "step {step}: qdot=({:+.4},{:+.4},{:+.4}) ee_err=({:+.4},{:+.4},{:+.3})",
            st.qdot[0], st.qdot[1], st.qdot[2],
            ee.x - d0.x, ee.z - d0.z, ee.pitch - d0.pitch
        );
    }
}

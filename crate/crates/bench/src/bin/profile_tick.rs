use og_core::arm::{forward_kinematics, osc_wrench, ArmModel, ControllerConfig, DesiredPose};
use og_core::env::{DomainParams, Scene};
use og_core::physics::Wrench;
use std::time::Instant;

fn time_scene(label: &str, vel_iters: usize, pos_iters: usize, with_arm: bool) {
    let domain = DomainParams::default();
    let model = ArmModel::default();
    let mut s = Scene::build(&domain, &model, 0.07, [1.2, -2.0, 0.4], true);
    if !with_arm {
        // strip arm bodies/joints: rebuild a bare world with the first 3 bodies (floor, wall, object)
        s.world.joints.clear();
        s.world.bodies.truncate(3);
    }
    s.world.velocity_iterations = vel_iters;
    s.world.position_iterations = pos_iters;
    let controller = ControllerConfig::default_compliant();
    let n: usize = 200_000;
    let desired = if with_arm {
        let state0 = s.arm_state(0.07, [[-2.9, 2.9]; 3]);
        DesiredPose { target: forward_kinematics(&state0) }
    } else {
        DesiredPose { target: og_core::math::Pose2::IDENTITY }
    };
    let mut buf: Vec<Wrench> = vec![Wrench::ZERO; s.world.bodies.len()];
    let t0 = Instant::now();
    for k in 0..n {
        if with_arm && k % 10 == 0 {
            let st = s.arm_state(0.07, [[-2.9, 2.9]; 3]);
            let out = osc_wrench(&st, &desired, &controller, &s.model);
            s.joint_torque_wrenches(out.torques, &mut buf);
        }
        s.world.step(&buf).unwrap();
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("{label:35} {:8.0} ticks/s  ({:.2} us/tick)", n as f64 / dt, dt / n as f64 * 1e6);
}

fn detection_only() {
    let domain = DomainParams::default();
    let model = ArmModel::default();
    let mut s = Scene::build(&domain, &model, 0.07, [1.2, -2.0, 0.4], true);
    s.world.joints.clear();
    s.world.bodies.truncate(3);
    let n = 200_000;
    let t0 = Instant::now();
    let mut total = 0usize;
    for _ in 0..n {
        total += s.world.detect_contacts().len();
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("detection only (3 bodies)           {:8.0} calls/s  ({:.2} us/call, {} contacts)", n as f64 / dt, dt / n as f64 * 1e6, total / n);
}

fn main() {
    time_scene("full scene, 20 vel iters", 20, 8, true);
    time_scene("full scene, 1 vel iter", 1, 8, true);
    time_scene("full scene, 20 vel, 0 pos", 20, 0, true);
    time_scene("bare bin (no arm), 20 vel", 20, 8, false);
    time_scene("bare bin, 1 vel, 0 pos", 1, 0, false);
    detection_only();
}

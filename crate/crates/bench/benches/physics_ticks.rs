//! Physics throughput: full bin scene (arm + object + bin) ticks per second.

use criterion::{criterion_group, criterion_main, Criterion, Throughput};

use og_core::arm::{forward_kinematics, osc_wrench, ArmModel, ControllerConfig, DesiredPose};
use og_core::env::{DomainParams, Scene};
use og_core::physics::Wrench;

fn bench_scene_ticks(c: &mut Criterion) {
    let domain = DomainParams::default();
    let model = ArmModel::default();
    let scene = Scene::build(&domain, &model, 0.07, [1.2, -2.0, 0.4], true);
    let controller = ControllerConfig::default_compliant();

    let mut group = c.benchmark_group("physics");
    group.throughput(Throughput::Elements(1000));
    group.bench_function("bin_scene_1000_ticks", |b| {
        b.iter_batched(
            || scene.clone(),
            |mut s| {
                let state = s.arm_state(0.07, [[-2.9, 2.9]; 3]);
                let desired = DesiredPose { target: forward_kinematics(&state) };
                let mut buf: Vec<Wrench> = Vec::new();
                for _ in 0..100 {
                    let st = s.arm_state(0.07, [[-2.9, 2.9]; 3]);
                    let out = osc_wrench(&st, &desired, &controller, &s.model);
                    s.joint_torque_wrenches(out.torques, &mut buf);
                    for _ in 0..10 {
                        s.world.step(&buf).unwrap();
                    }
                }
                s
            },
            criterion::BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_scene_ticks);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};

use cavmag::exec::Workers;
use cavmag::gaussian::Measure;
use cavmag::model::SystemParams;
use cavmag::sweep::{run_grid, Axis, AxisParam, GridSpec, Linkage};

fn detuning_grid() -> GridSpec {
    GridSpec {
        name: "bench".into(),
        axes: vec![
            Axis::new(AxisParam::Delta1, -3.0, 2.0, 24),
            Axis::new(AxisParam::Delta2, -3.0, 2.0, 24),
        ],
        linkage: Linkage::Independent,
        base: SystemParams::defaults(),
        measures: vec![Measure::EnDE, Measure::EnNE, Measure::RNDE],
    }
}

fn grid(c: &mut Criterion) {
    let spec = detuning_grid();
    let mut group = c.benchmark_group("grid_24x24");
    group.sample_size(10);
    group.bench_function("serial", |b| b.iter(|| run_grid(&spec, Workers::SERIAL).unwrap()));
    group.bench_function("parallel", |b| b.iter(|| run_grid(&spec, Workers::default()).unwrap()));
    group.finish();
}

criterion_group!(benches, grid);
criterion_main!(benches);

// scratch tuning harness (deleted before ship)
use proxsplit::imaging::{degrade, pgm, snr, BlurOp, ImageGrid, NoiseKind};
use proxsplit::pipeline::config::{Algorithm, RunConfig};
use proxsplit::pipeline::{cmd_restore, cmd_simulate};

fn main() {
    let dir = std::env::temp_dir().join("proxsplit-chi-sweep");
    std::fs::create_dir_all(&dir).unwrap();
    let truth = ImageGrid::phantom(64, 64);
    let input = dir.join("truth.pgm");
    pgm::write_pgm(&input, &truth, pgm::PgmFormat::Binary8).unwrap();
    let alpha = 0.1;
    let blur = BlurOp::new(5).unwrap();
    let z = degrade(&truth, &blur, NoiseKind::Poisson, &vec![alpha; truth.len()], 7).unwrap();
    let z_scaled = ImageGrid::new(64, 64, z.data.iter().map(|v| v / alpha).collect());
    println!("degraded: {:.3} dB", snr(&z_scaled, &truth).unwrap());

    for (algo, theta) in [
        (Algorithm::FbOuter, 0.001),
        (Algorithm::FbOuter, 0.01),
        (Algorithm::FbOuter, 0.1),
        (Algorithm::FbOuter, 1.0),
        (Algorithm::DrOuter, 0.1),
        (Algorithm::DrOuter, 1.0),
    ] {
        let config_text = format!(
            "image.input = {input}\n\
             image.ground_truth = {input}\n\
             blur.q = 5\n\
             noise.family = poisson\n\
             noise.alpha = {alpha}\n\
             frame.levels = 3\n\
             potentials.chi = 0.01\n\
             potentials.omega = 1e-5\n\
             potentials.approx.chi = 0\n\
             potentials.approx.omega = 1e-8\n\
             extension.theta = {theta}\n\
             solver.kappa = 60\n\
             solver.eta = 1e-4\n\
             solver.inner_cap = 50\n\
             solver.outer_cap = 30000\n\
             solver.outer_tol = 1e-4\n\
             solver.algorithm = {algo}\n\
             seed = 7\n",
            input = input.display(),
            algo = algo.name(),
        );
        let cfg = RunConfig::from_str(&config_text).unwrap();
        let out = dir.join(format!("{}-{theta}", algo.name()));
        cmd_simulate(&cfg, &out).unwrap();
        let s = cmd_restore(&cfg, &out).unwrap();
        println!(
            "{} theta {theta:>6}: restored {:.3} dB | obj {:.8e} | {} iters | {:.1} s",
            algo.name(),
            s.snr_restored.unwrap(),
            s.objective_final,
            s.outer_iterations,
            s.wall_seconds
        );
    }
}

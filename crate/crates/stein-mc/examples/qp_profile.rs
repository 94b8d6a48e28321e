use std::time::Instant;

use stein_mc::kernel::median_bandwidth;
use stein_mc::{seeds, simplex, ScoredTarget, SteinKernel};

fn main() {
    let target = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
    for &n in &[256usize, 512, 1024] {
        let mut rng = seeds::rng(1, &[n as u64]);
        let x = target.sample(n, &mut rng);
        let kernel = SteinKernel::new(median_bandwidth(&x).unwrap(), target.clone()).unwrap();
        let t0 = Instant::now();
        let gram = kernel.gram(&x).unwrap();
        let t_gram = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let sol = simplex::solve(&gram.k0, 50.0 / n as f64, 1e-8, 50_000).unwrap();
        let t_qp = t1.elapsed().as_secs_f64();
        println!(
            "n {n}: gram {t_gram:.2}s qp {t_qp:.2}s iters {} kkt {:.2e} conv {}",
            sol.iterations, sol.kkt_residual, sol.converged
        );
    }
}

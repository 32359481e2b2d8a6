use loewner_core::fft::{fft, ifft};
use loewner_lab::sampling::gaussian_vec;
use rustfft::FftPlanner;

#[test]
fn agrees_with_rustfft() {
    let mut planner = FftPlanner::<f64>::new();
    for log_n in 0..=10 {
        let n = 1usize << log_n;
        let x = gaussian_vec(log_n as u64, 0, n, 1.0);
        let mut ours = x.clone();
        fft(&mut ours).unwrap();
        let mut theirs = x.clone();
        planner.plan_fft_forward(n).process(&mut theirs);
        let scale = (n as f64).sqrt();
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).norm() < 1e-13 * scale * (log_n as f64 + 1.0), "n = {n}");
        }
        let mut back = ours.clone();
        ifft(&mut back).unwrap();
        let mut reference = theirs;
        planner.plan_fft_inverse(n).process(&mut reference);
        for ((a, b), orig) in back.iter().zip(&reference).zip(&x) {
            assert!((a - b).norm() < 1e-12 * n as f64);
            assert!((a / n as f64 - orig).norm() < 1e-13 * (log_n as f64 + 1.0));
        }
    }
}

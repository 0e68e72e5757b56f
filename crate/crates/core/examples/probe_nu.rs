// temporary probe: dense nu(delta) landscape on the reference box
use helmholtz_core::polysolve::max_residual_on;
use helmholtz_core::polysolve::PolyScheme;
use helmholtz_core::spectrum::SpectralBox;
use num_complex::Complex64;

fn main() {
    let bbox = SpectralBox::new(-1.0, 2.8, 0.65).unwrap();
    let z = Complex64::i();
    let z0 = PolyScheme::center_for(&bbox, z);
    for samples in [512usize, 4096, 65536] {
        let pts = bbox.boundary_samples(samples);
        println!("== samples {}", pts.len());
        for q in [2usize, 3, 5] {
            let mut best = (0.0, f64::INFINITY);
            for k in 1..=1200 {
                let delta = k as f64 * 0.001;
                let nu = max_residual_on(&pts, q, delta, z0, z).unwrap();
                if nu < best.1 { best = (delta, nu); }
            }
            println!("q={q}: argmin delta={:.4} nu={:.4}", best.0, best.1);
            for delta in [0.688, 0.713, 0.75, 0.938] {
                let nu = max_residual_on(&pts, q, delta, z0, z).unwrap();
                println!("   nu({delta:.3}) = {nu:.5}");
            }
        }
    }
}

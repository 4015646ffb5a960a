//! Power iteration, deflation and the PSD check on a small Gram matrix.
//!
//! cargo run --example spectral_primitives

use eigengap::spectral_core::{deflate, dense_eigen, is_psd, top_eigenpair, EigenSettings};
use eigengap::SymMatrix;
use nalgebra::DMatrix;

fn main() -> eigengap::Result<()> {
    let x = DMatrix::from_fn(8, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4);
    let a = SymMatrix::new(x.transpose() * &x)?;
    let settings = EigenSettings::default_for(a.n());

    let top = top_eigenpair(&a, settings.tol, settings.max_iter)?;
    let second = top_eigenpair(
        &deflate(&a, &[top.clone()])?,
        settings.tol,
        settings.max_iter,
    )?;
    let dense = dense_eigen(&a).values;
    println!(
        "power iteration: {:.10} then {:.10}",
        top.value, second.value
    );
    println!("dense spectrum:  {dense:.10?}");
    println!("gram matrix is PSD: {}", is_psd(&a, 1e-9));
    Ok(())
}

//! Mutual entropy of a state through a channel, with the degenerate search.

use qentropy::channels::channel_zoo;
use qentropy::mutual::{cross_check_forms, mutual_entropy};
use qentropy::search::SearchParams;
use qentropy::states::{density_with_spectrum, random_density, sample_schatten, spectral_decomposition};

fn main() -> qentropy::Result<()> {
    let search = SearchParams::default().with_seed(1);
    let ch = channel_zoo("amplitude-damping", &[0.4])?;

    let rho = random_density(2, 2, 5)?;
    let out = mutual_entropy(&rho, &ch, &search)?;
    println!("generic spectrum:    I = {:.9} (exact: {})", out.value.nats(), out.is_exact);

    // a repeated eigenvalue makes the decomposition non-unique
    let dephase = channel_zoo("dephasing", &[0.7, 3.0])?;
    let rho = density_with_spectrum(&[0.5, 0.25, 0.25], 3)?;
    let out = mutual_entropy(&rho, &dephase, &search)?;
    println!(
        "degenerate spectrum: I >= {:.9} after {} evaluations",
        out.value.nats(),
        out.evaluations
    );

    let e = sample_schatten(&spectral_decomposition(&rho, 1e-8), 9);
    let forms = cross_check_forms(&rho, &dephase, &e)?;
    println!("two forms on one decomposition differ by {:.1e}", forms.difference());
    Ok(())
}

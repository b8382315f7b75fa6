//! Pseudo-mutual entropy over non-orthogonal decompositions.

use qentropy::channels::channel_zoo;
use qentropy::mutual::{mutual_entropy, pseudo_mutual_entropy};
use qentropy::search::SearchParams;
use qentropy::states::random_density;

fn main() -> qentropy::Result<()> {
    let search = SearchParams::default().with_restarts(4).with_seed(3);
    let ch = channel_zoo("depolarizing", &[0.3])?;
    let rho = random_density(2, 2, 11)?;
    let i = mutual_entropy(&rho, &ch, &search)?;
    let ip = pseudo_mutual_entropy(&rho, &ch, &search)?;
    println!("I   = {:.9}", i.value.nats());
    println!("I_p = {:.9} ({} evaluations)", ip.value.nats(), ip.evaluations);
    Ok(())
}

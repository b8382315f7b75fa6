//! Capacities of a qubit channel over state sets.

use qentropy::capacity::{pseudo_capacity, quantum_capacity, StateSet};
use qentropy::channels::channel_zoo;
use qentropy::search::SearchParams;

fn main() -> qentropy::Result<()> {
    let search = SearchParams::default().with_restarts(4).with_refine_iters(80).with_seed(2);
    let ch = channel_zoo("amplitude-damping", &[0.3])?;
    for (label, set) in [("diagonal states", StateSet::DiagonalSimplex(2)), ("all states", StateSet::FullSpace(2))] {
        let c = quantum_capacity(&ch, &set, &search)?;
        println!("C over {label:<16} = {:.9} (lower bound: {})", c.value.nats(), c.lower_bound);
    }
    let cp = pseudo_capacity(&ch, &StateSet::FullSpace(2), &search)?;
    println!("C_p over all states     = {:.9}", cp.value.nats());
    Ok(())
}

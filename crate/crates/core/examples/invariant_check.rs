//! The invariant battery for qubits over a few seeds.

use qentropy::cli::check_suite;

fn main() {
    let report = check_suite(&[2], &[1, 2, 3]);
    for inv in report.invariants.iter().take(12) {
        println!("[{}] {}", if inv.passed { "pass" } else { "FAIL" }, inv.name);
    }
    println!("{} invariants, {} failures", report.invariants.len(), report.failure_count());
}

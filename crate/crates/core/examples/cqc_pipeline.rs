//! Coding, channel and decoding as a classical channel.

use qentropy::capacity::{coding_decoding_capacity, cqc_capacity, CodingFamily, DecodingFamily, DistributionSet};
use qentropy::channels::{channel_zoo, MeasurementDecoding, QuantumCoding};
use qentropy::cqc::{build_pipeline, induced_classical_channel, trace_pipeline, MessageEnsemble};
use qentropy::search::SearchParams;

fn main() -> qentropy::Result<()> {
    let ch = channel_zoo("bit-flip", &[0.1])?;
    let pipe = build_pipeline(QuantumCoding::basis(2), ch.clone(), MeasurementDecoding::basis(2))?;
    let t = induced_classical_channel(&pipe);
    println!("induced channel: {:?}", t.matrix());

    let trace = trace_pipeline(&pipe, &MessageEnsemble::new(vec![0.8, 0.2])?)?;
    println!("decoded distribution: {:?}", trace.decoded);

    let inputs = DistributionSet::FullSimplex(2);
    let c = cqc_capacity(&pipe, &inputs, &SearchParams::default())?;
    println!("C^P0 = {:.9} nats (ln 2 - h(0.1))", c.value.nats());

    let search = SearchParams::default().with_restarts(2).with_refine_iters(40);
    let codings = CodingFamily { members: vec![QuantumCoding::basis(2)], constellation: Some(2) };
    let decodings = DecodingFamily { members: vec![MeasurementDecoding::basis(2)], projective: true };
    let ccd = coding_decoding_capacity(&ch, &inputs, &codings, &decodings, &search)?;
    println!("C_cd >= {:.9} nats", ccd.value.nats());
    Ok(())
}

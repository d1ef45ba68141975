//! Streaming primitives.

pub mod bucket;
pub mod l0;
pub mod reservoir;
pub mod vertex_sampler;

pub use bucket::{
    bucket_sampler_build, bucket_sampler_extract, bucket_sampler_update, BucketConfig, BucketSampler,
};
pub use l0::{l0_update, L0Bank, L0Outcome, L0Sampler};
pub use reservoir::ReservoirT;
pub use vertex_sampler::VertexSamplerState;

/// Offer one item to a reservoir.
pub fn reservoir_offer<T: Copy>(r: &mut ReservoirT<T>, item: T) {
    r.offer(item)
}

/// Feed one edge to the vertex sampler.
pub fn vertex_sampler_step(s: &mut VertexSamplerState, u: crate::graph::Vertex, v: crate::graph::Vertex) {
    s.step(u, v)
}

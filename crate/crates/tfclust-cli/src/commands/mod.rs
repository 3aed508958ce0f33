pub mod bench;
pub mod cluster;
pub mod evaluate;
pub mod simulate;
pub mod transform;

pub(crate) mod pipeline;

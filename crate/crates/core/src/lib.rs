//! Least-significant-bit steganography for RGB images.
//!
//! Three codecs share one interface ([`methods`]): a cyclic method that
//! spreads message bits over RED, GREEN and BLUE by pixel index, a classical
//! blue-channel LSB baseline and a keyed baseline that picks GREEN or BLUE
//! from `LSB(RED) XOR key`. [`metrics`] evaluates cover/stego pairs with
//! MSE, PSNR and histograms, and [`bench`] runs experiment grids over them.

pub mod bench;
pub mod bits;
pub mod error;
pub mod image;
pub mod methods;
pub mod metrics;

pub use bench::{
    default_key, generate_cipher, run_experiment, run_experiment_with, BenchImage, Cell, Execution,
    ExperimentMode, ExperimentSpec, ResultTable, TableFormat,
};
pub use bits::{
    bits_to_bytes, bytes_to_bits, frame_payload, parse_frame, BitSequence, HEADER_BITS,
};
pub use error::{Result, StegoError};
pub use image::{
    capacity_bits, extract_lsb, load_image, merge_planes, payload_capacity_bytes, replace_lsb,
    save_image, split_planes, ChannelId, Plane, RgbImage,
};
pub use methods::{
    channel_for_index, embed_classic_lsb, embed_cyclic, embed_karim, embed_message,
    extract_classic_lsb, extract_cyclic, extract_karim, extract_message, ChannelCursor, Codec,
    EmbedReport, MethodId, StegoKey,
};
pub use metrics::{
    histogram, histogram_delta, mse, psnr, psnr_from_mse, CmaxMode, Histogram, HistogramDelta,
    MetricsRecord, MetricsReport, MseBreakdown,
};

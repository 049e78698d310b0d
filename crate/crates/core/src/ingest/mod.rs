//! Dataset ingestion: tensor files, manifests, point-cloud preprocessing and
//! the spatial low-pass baseline.

pub mod lowpass;
pub mod manifest;
pub mod pointcloud;
pub mod tensor_file;

pub use lowpass::{radial_lowpass, RadialLowpass, RadialMask};
pub use manifest::{DatasetManifest, ManifestSample, Split};
pub use pointcloud::{
    align_frames, align_points, compute_norm_stats, recording_to_tensor, shape_features, Layout,
    NormStats, Point, PreprocessConfig, ShapeMode,
};
pub use tensor_file::{read_tensor, write_tensor, TensorFile};

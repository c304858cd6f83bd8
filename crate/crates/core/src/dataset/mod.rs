//! Corpus input and output: CIFAR batches, image files, directory scans and
//! manifests.

pub mod cifar;
pub mod corpus;
pub mod imagefile;
pub mod manifest;

pub use cifar::{decode_cifar, encode_cifar, read_cifar_batch, write_cifar_batch, CifarRecord, CifarVariant};
pub use corpus::{relative_key, scan_corpus, DEFAULT_EXTENSIONS};
pub use imagefile::{decode_image, encode_image, read_image_file, write_image_file, ImageFormat};
pub use manifest::{encode_manifest, read_manifest, write_manifest, Label, ManifestHeader, ManifestRow, MANIFEST_FILE};

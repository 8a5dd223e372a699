use rayon::prelude::*;
use thiserror::Error;
use unprop_core::{item_rng, unprop, AugmentationRecord, Image, ParamsError, UnpropError, UnpropParams};

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("item {index}: {source}")]
    Item {
        index: u64,
        #[source]
        source: UnpropError,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Augments a batch in parallel. Each item is keyed by a stream index
/// that, together with `params.seed`, fully determines its RNG stream,
/// so results are independent of thread count and scheduling. Output
/// order matches input order.
pub fn apply_batch(
    items: Vec<(u64, Image)>,
    params: &UnpropParams,
    threads: Option<usize>,
) -> Result<Vec<(Image, AugmentationRecord)>, BatchError> {
    params.validate()?;
    let seed = params.seed;
    let run = || {
        items
            .into_par_iter()
            .map(|(index, img)| {
                let mut rng = item_rng(seed, index);
                unprop(img, params, &mut rng)
                    .map_err(|source| BatchError::Item { index, source })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BatchError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    }
}

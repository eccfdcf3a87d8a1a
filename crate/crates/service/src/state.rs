use std::collections::HashMap;
use std::sync::Arc;

use muscale_core::recognizer::{analyze, Analysis};
use muscale_core::{parse_document, Document, Palette, RecognizerConfig};
use parking_lot::{Mutex, RwLock};

use crate::store::{Store, StoreError};

/// Upper bound on cached analyses. The cache is cleared when it fills up.
const CACHE_CAPACITY: usize = 4096;

/// A stored document together with its recognition results.
#[derive(Debug)]
pub struct Computed {
    pub document: Document,
    pub analysis: Analysis,
}

/// Shared server state: the store, the active recognizer configuration and
/// analyses cached by `(contentHash, config digest)`.
pub struct AppState {
    store: Store,
    config: RwLock<RecognizerConfig>,
    palette: Palette,
    cache: Mutex<HashMap<(String, String), Arc<Computed>>>,
}

impl AppState {
    pub fn new(store: Store, config: RecognizerConfig) -> Self {
        Self {
            store,
            config: RwLock::new(config),
            palette: Palette::default(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn config(&self) -> RecognizerConfig {
        *self.config.read()
    }

    /// Switches the recognizer configuration. Entries cached under the old
    /// digest are no longer consulted.
    pub fn set_config(&self, config: RecognizerConfig) {
        *self.config.write() = config;
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().len()
    }

    /// Analysis of the stored document under the current configuration.
    pub fn computed(&self, content_hash: &str) -> Result<Arc<Computed>, StoreError> {
        let config = self.config();
        let key = (content_hash.to_owned(), config.digest());
        if let Some(hit) = self.cache.lock().get(&key) {
            return Ok(hit.clone());
        }
        let bytes = self.store.load_blob(content_hash)?;
        let document = parse_document(&bytes)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        let analysis = analyze(&document, &config);
        let computed = Arc::new(Computed { document, analysis });
        let mut cache = self.cache.lock();
        if cache.len() >= CACHE_CAPACITY {
            cache.clear();
        }
        cache.insert(key, computed.clone());
        Ok(computed)
    }
}

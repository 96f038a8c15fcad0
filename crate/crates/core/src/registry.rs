//! One-time public-key bookkeeping.
//!
//! Every issued public key may encrypt exactly one bit. [`Registry::consume`]
//! is an atomic check-and-set: of any number of concurrent callers for the
//! same key, exactly one succeeds.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::scheme::{KeyId, PublicKey};

pub trait Registry {
    /// Stores a newly issued key. Re-registering an existing id is an error.
    fn register(&self, pk: &PublicKey) -> Result<()>;

    fn fetch(&self, id: &KeyId) -> Result<PublicKey>;

    fn is_consumed(&self, id: &KeyId) -> Result<bool>;

    /// Marks the key as used, failing with [`Error::KeyConsumed`] if it
    /// already was.
    fn consume(&self, id: &KeyId) -> Result<()>;

    /// Fetches and consumes in one step.
    fn checkout(&self, id: &KeyId) -> Result<PublicKey> {
        let pk = self.fetch(id)?;
        self.consume(id)?;
        Ok(pk)
    }
}

/// In-process registry.
#[derive(Debug, Default)]
pub struct MemoryRegistry {
    keys: Mutex<HashMap<KeyId, (PublicKey, bool)>>,
}

impl MemoryRegistry {
    pub fn len(&self) -> usize {
        self.keys.lock().expect("registry lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Registry for MemoryRegistry {
    fn register(&self, pk: &PublicKey) -> Result<()> {
        let mut keys = self.keys.lock().expect("registry lock poisoned");
        if keys.contains_key(&pk.key_id) {
            return Err(Error::Parameter(format!("key {} is already registered", pk.key_id)));
        }
        keys.insert(pk.key_id.clone(), (pk.clone(), false));
        Ok(())
    }

    fn fetch(&self, id: &KeyId) -> Result<PublicKey> {
        let keys = self.keys.lock().expect("registry lock poisoned");
        keys.get(id)
            .map(|(pk, _)| pk.clone())
            .ok_or_else(|| Error::UnknownKey(id.to_string()))
    }

    fn is_consumed(&self, id: &KeyId) -> Result<bool> {
        let keys = self.keys.lock().expect("registry lock poisoned");
        keys.get(id)
            .map(|&(_, used)| used)
            .ok_or_else(|| Error::UnknownKey(id.to_string()))
    }

    fn consume(&self, id: &KeyId) -> Result<()> {
        let mut keys = self.keys.lock().expect("registry lock poisoned");
        let entry = keys.get_mut(id).ok_or_else(|| Error::UnknownKey(id.to_string()))?;
        if entry.1 {
            return Err(Error::KeyConsumed(id.to_string()));
        }
        entry.1 = true;
        Ok(())
    }
}

/// Registry persisted in a directory: `<id>.pub` holds the key and the
/// presence of `<id>.consumed` marks it used. Both are created with
/// `create_new`, so the check-and-set is atomic across processes.
#[derive(Clone, Debug)]
pub struct DirRegistry {
    root: PathBuf,
}

impl DirRegistry {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn pub_path(&self, id: &KeyId) -> PathBuf {
        self.root.join(format!("{id}.pub"))
    }

    fn consumed_path(&self, id: &KeyId) -> PathBuf {
        self.root.join(format!("{id}.consumed"))
    }

    /// Ids of every stored key, sorted.
    pub fn ids(&self) -> Result<Vec<KeyId>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "pub") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(KeyId::new(stem)?);
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

impl Registry for DirRegistry {
    fn register(&self, pk: &PublicKey) -> Result<()> {
        let mut file = match OpenOptions::new().write(true).create_new(true).open(self.pub_path(&pk.key_id)) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                return Err(Error::Parameter(format!("key {} is already registered", pk.key_id)));
            }
            Err(e) => return Err(e.into()),
        };
        file.write_all(pk.to_string().as_bytes())?;
        file.sync_all()?;
        Ok(())
    }

    fn fetch(&self, id: &KeyId) -> Result<PublicKey> {
        match fs::read_to_string(self.pub_path(id)) {
            Ok(text) => {
                let pk: PublicKey = text.parse()?;
                if &pk.key_id != id {
                    return Err(Error::Parse(format!("file for {id} holds key {}", pk.key_id)));
                }
                Ok(pk)
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(Error::UnknownKey(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    fn is_consumed(&self, id: &KeyId) -> Result<bool> {
        if !self.pub_path(id).exists() {
            return Err(Error::UnknownKey(id.to_string()));
        }
        Ok(self.consumed_path(id).exists())
    }

    fn consume(&self, id: &KeyId) -> Result<()> {
        if !self.pub_path(id).exists() {
            return Err(Error::UnknownKey(id.to_string()));
        }
        match OpenOptions::new().write(true).create_new(true).open(self.consumed_path(id)) {
            Ok(_) => Ok(()),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(Error::KeyConsumed(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::scheme::{issue_public_key, PrivateKey};

    fn sample_key(seed: u64) -> PublicKey {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sk = PrivateKey::generate(4, 4, 2, &mut rng).unwrap();
        issue_public_key(&sk, &mut rng).unwrap()
    }

    fn exercise(reg: &impl Registry) {
        let pk = sample_key(1);
        let missing = KeyId::new("nope").unwrap();
        assert!(matches!(reg.consume(&missing), Err(Error::UnknownKey(_))));
        reg.register(&pk).unwrap();
        assert!(reg.register(&pk).is_err());
        assert_eq!(reg.fetch(&pk.key_id).unwrap(), pk);
        assert!(!reg.is_consumed(&pk.key_id).unwrap());
        assert_eq!(reg.checkout(&pk.key_id).unwrap(), pk);
        assert!(reg.is_consumed(&pk.key_id).unwrap());
        assert!(matches!(reg.consume(&pk.key_id), Err(Error::KeyConsumed(_))));
    }

    #[test]
    fn memory_registry_consumes_once() {
        exercise(&MemoryRegistry::default());
    }

    #[test]
    fn dir_registry_consumes_once_and_persists() {
        let dir = std::env::temp_dir().join(format!("bitqpke-reg-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        exercise(&DirRegistry::open(&dir).unwrap());
        let reopened = DirRegistry::open(&dir).unwrap();
        let pk = sample_key(1);
        assert_eq!(reopened.ids().unwrap(), vec![pk.key_id.clone()]);
        assert!(reopened.is_consumed(&pk.key_id).unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn concurrent_consumers_race_to_one_winner() {
        let reg = MemoryRegistry::default();
        let pk = sample_key(2);
        reg.register(&pk).unwrap();
        let wins = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..16 {
                s.spawn(|| {
                    if reg.consume(&pk.key_id).is_ok() {
                        wins.fetch_add(1, Ordering::SeqCst);
                    }
                });
            }
        });
        assert_eq!(wins.load(Ordering::SeqCst), 1);
    }
}

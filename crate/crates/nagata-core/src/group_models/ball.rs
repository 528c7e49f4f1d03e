//! Word-metric balls by breadth-first search in the Cayley graph.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::{GroupModel, ModelError};

/// Default ball memory budget.
pub const DEFAULT_MEMORY_CAP_BYTES: u64 = 8 << 30;

#[derive(Debug, Error)]
pub enum BallError {
    #[error("memory cap of {cap_bytes} bytes reached: complete up to radius {radius_reached} ({elements} elements)")]
    MemoryCap { radius_reached: u32, elements: usize, cap_bytes: u64 },
    #[error("cache file does not match: {0}")]
    CacheMismatch(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// All elements of word length `≤ radius`, in BFS discovery order.
#[derive(Clone, Debug)]
pub struct WordBall<E> {
    pub model_name: String,
    pub generator_hash: u64,
    pub radius: u32,
    elements: Vec<E>,
    lengths: Vec<u32>,
    index: FxHashMap<E, u32>,
}

impl<E: super::Element> WordBall<E> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn length(&self, g: &E) -> Option<u32> {
        self.index.get(g).map(|&i| self.lengths[i as usize])
    }

    pub fn index_of(&self, g: &E) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    pub fn contains(&self, g: &E) -> bool {
        self.index.contains_key(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, u32)> {
        self.elements.iter().zip(self.lengths.iter().copied())
    }

    /// Elements in the outer shell `ℓ ≥ R − 1`, whose statistics may be
    /// truncated by the ball.
    pub fn is_boundary(&self, g: &E) -> bool {
        self.length(g).is_some_and(|l| l + 1 >= self.radius)
    }

    /// The sub-ball of radius `r ≤ self.radius` (a prefix in BFS order).
    pub fn truncate(&self, r: u32) -> WordBall<E> {
        let end = self.lengths.partition_point(|&l| l <= r);
        let elements = self.elements[..end].to_vec();
        let lengths = self.lengths[..end].to_vec();
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        WordBall {
            model_name: self.model_name.clone(),
            generator_hash: self.generator_hash,
            radius: r.min(self.radius),
            elements,
            lengths,
            index,
        }
    }
}

fn bytes_per_element<E>() -> u64 {
    // element stored twice (vector + map key) plus map slot overhead
    (2 * std::mem::size_of::<E>() + 16) as u64
}

pub fn bfs_ball<G: GroupModel>(model: &G, radius: u32) -> Result<WordBall<G::Elem>, BallError> {
    bfs_ball_with_cap(model, radius, DEFAULT_MEMORY_CAP_BYTES)
}

/// Breadth-first search to `radius`. Multiplication is on the right by
/// generators, so `ℓ` is the left-invariant word length. Elements are
/// ordered by length, then by element.
pub fn bfs_ball_with_cap<G: GroupModel>(
    model: &G,
    radius: u32,
    cap_bytes: u64,
) -> Result<WordBall<G::Elem>, BallError> {
    grow(model, cap_bytes, |r, _| r >= radius).map(|mut b| {
        b.radius = radius;
        b
    })
}

/// Grow a ball until every element of `targets` has been reached.
pub fn bfs_until_found<G: GroupModel>(
    model: &G,
    targets: &[G::Elem],
    cap_bytes: u64,
) -> Result<WordBall<G::Elem>, BallError> {
    let mut remaining: rustc_hash::FxHashSet<&G::Elem> = targets.iter().collect();
    grow(model, cap_bytes, |_, fresh| {
        for g in fresh {
            remaining.remove(g);
        }
        remaining.is_empty()
    })
}

fn grow<G: GroupModel>(
    model: &G,
    cap_bytes: u64,
    mut done: impl FnMut(u32, &[G::Elem]) -> bool,
) -> Result<WordBall<G::Elem>, BallError> {
    let gens = model.generators();
    let max_elems = cap_bytes / bytes_per_element::<G::Elem>();
    let e = model.identity();
    let mut elements = vec![e.clone()];
    let mut lengths = vec![0u32];
    let mut index: FxHashMap<G::Elem, u32> = FxHashMap::default();
    index.insert(e, 0);
    let mut level_start = 0usize;
    let mut r = 0u32;
    loop {
        if done(r, &elements[level_start..]) {
            break;
        }
        let level_end = elements.len();
        if level_start == level_end {
            break;
        }
        for i in level_start..level_end {
            for s in &gens {
                let h = model.multiply(&elements[i], s);
                if !index.contains_key(&h) {
                    if elements.len() as u64 >= max_elems {
                        return Err(BallError::MemoryCap {
                            radius_reached: r,
                            elements: level_end,
                            cap_bytes,
                        });
                    }
                    index.insert(h.clone(), elements.len() as u32);
                    elements.push(h);
                    lengths.push(r + 1);
                }
            }
        }
        // canonical order within a sphere, matching what a cache reload gives
        elements[level_end..].sort_unstable();
        for (i, g) in elements.iter().enumerate().skip(level_end) {
            *index.get_mut(g).expect("indexed") = i as u32;
        }
        level_start = level_end;
        r += 1;
    }
    Ok(WordBall {
        model_name: model.name(),
        generator_hash: model.generator_hash(),
        radius: r,
        elements,
        lengths,
        index,
    })
}

/// Brute-force word enumeration: multiply out every word of length `≤ r`
/// and keep the shortest length per element. Exponential; a test oracle.
pub fn enumerate_words<G: GroupModel>(model: &G, r: u32) -> FxHashMap<G::Elem, u32> {
    let gens = model.generators();
    let mut out = FxHashMap::default();
    let mut words = vec![model.identity()];
    out.insert(model.identity(), 0);
    for len in 1..=r {
        let mut next = Vec::with_capacity(words.len() * gens.len());
        for w in &words {
            for s in &gens {
                let h = model.multiply(w, s);
                out.entry(h.clone()).or_insert(len);
                next.push(h);
            }
        }
        words = next;
    }
    out
}

const MAGIC: &[u8; 8] = b"NAGBALL1";

/// Cache file name for a model and radius under `dir`.
pub fn cache_path<G: GroupModel>(dir: &Path, model: &G, radius: u32) -> PathBuf {
    let safe: String = model
        .name()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    dir.join(format!("{safe}-{:016x}-r{radius}.ball", model.generator_hash()))
}

/// Binary cache: magic, model name, generator hash, radius, then records
/// `(tuple, length)` sorted by tuple.
pub fn write_cache<G: GroupModel>(model: &G, ball: &WordBall<G::Elem>, w: &mut impl Write) -> io::Result<()> {
    let mut recs: Vec<(Vec<i64>, u32)> = ball.iter().map(|(g, l)| (model.to_tuple(g), l)).collect();
    recs.sort_unstable();
    w.write_all(MAGIC)?;
    let name = ball.model_name.as_bytes();
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name)?;
    w.write_all(&ball.generator_hash.to_le_bytes())?;
    w.write_all(&ball.radius.to_le_bytes())?;
    w.write_all(&(recs.len() as u64).to_le_bytes())?;
    for (t, l) in recs {
        w.write_all(&(t.len() as u32).to_le_bytes())?;
        for x in t {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&l.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Load a cache written by [`write_cache`]; elements come back ordered by
/// length, then tuple.
pub fn read_cache<G: GroupModel>(model: &G, r: &mut impl Read) -> Result<WordBall<G::Elem>, BallError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(BallError::CacheMismatch("bad magic".into()));
    }
    let n = read_u32(r)? as usize;
    let mut name = vec![0u8; n];
    r.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|_| BallError::CacheMismatch("bad name".into()))?;
    let hash = read_u64(r)?;
    if name != model.name() || hash != model.generator_hash() {
        return Err(BallError::CacheMismatch(format!("cache is for {name} ({hash:016x})")));
    }
    let radius = read_u32(r)?;
    let count = read_u64(r)? as usize;
    let mut recs: Vec<(u32, G::Elem)> = Vec::with_capacity(count);
    for _ in 0..count {
        let k = read_u32(r)? as usize;
        let mut t = Vec::with_capacity(k);
        for _ in 0..k {
            t.push(read_u64(r)? as i64);
        }
        let l = read_u32(r)?;
        recs.push((l, model.from_tuple(&t)?));
    }
    recs.sort();
    let mut elements = Vec::with_capacity(count);
    let mut lengths = Vec::with_capacity(count);
    let mut index = FxHashMap::default();
    for (i, (l, g)) in recs.into_iter().enumerate() {
        index.insert(g.clone(), i as u32);
        elements.push(g);
        lengths.push(l);
    }
    Ok(WordBall { model_name: name, generator_hash: hash, radius, elements, lengths, index })
}

/// Load the ball from `dir` if cached, otherwise compute and store it.
pub fn cached_ball<G: GroupModel>(model: &G, radius: u32, dir: &Path) -> Result<WordBall<G::Elem>, BallError> {
    let path = cache_path(dir, model, radius);
    if path.exists() {
        let mut f = io::BufReader::new(std::fs::File::open(&path)?);
        return read_cache(model, &mut f);
    }
    let ball = bfs_ball(model, radius)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = io::BufWriter::new(std::fs::File::create(&tmp)?);
        write_cache(model, &ball, &mut f)?;
        f.flush()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(ball)
}

/// CSV with columns `length,element`, element as space-separated tuple,
/// rows sorted by tuple.
pub fn write_csv<G: GroupModel>(model: &G, ball: &WordBall<G::Elem>, w: impl Write) -> Result<(), BallError> {
    let mut recs: Vec<(Vec<i64>, u32)> = ball.iter().map(|(g, l)| (model.to_tuple(g), l)).collect();
    recs.sort_unstable();
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["length", "element"])?;
    for (t, l) in recs {
        let s: Vec<String> = t.iter().map(i64::to_string).collect();
        out.write_record([l.to_string(), s.join(" ")])?;
    }
    out.flush()?;
    Ok(())
}

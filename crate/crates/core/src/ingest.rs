//! Reader for UCI bag-of-words `docword` files.
//!
//! The format is three header lines (`D`, `W`, `NNZ`) followed by `NNZ`
//! lines of `docID wordID count`, all 1-based. Counts are discarded: a word
//! is present in a document iff it appears with a positive count.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vector::SparseBinaryVector;

/// A binarized document collection; every vector has dimension `vocab_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub num_docs: usize,
    pub vocab_size: usize,
    pub vectors: Vec<SparseBinaryVector>,
}

impl Corpus {
    pub fn new(vocab_size: usize, vectors: Vec<SparseBinaryVector>) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.dim() != vocab_size) {
            return Err(Error::DimensionMismatch {
                expected: vocab_size,
                found: bad.dim(),
            });
        }
        Ok(Self {
            num_docs: vectors.len(),
            vocab_size,
            vectors,
        })
    }

    pub fn nnz(&self) -> usize {
        self.vectors.iter().map(|v| v.count_ones()).sum()
    }
}

pub fn parse_docword<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

    let mut header = [0usize; 3];
    for (slot, name) in header.iter_mut().zip(["document count", "vocabulary size", "nonzero count"]) {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("missing {name} header line")))?;
        let line = line?;
        *slot = line
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("expected {name}, found {:?}", line.trim())))?;
    }
    let [num_docs, vocab_size, nnz] = header;
    if vocab_size == 0 || vocab_size > u32::MAX as usize {
        return Err(Error::parse(2, "vocabulary size must be in 1..=u32::MAX"));
    }

    let mut docs: Vec<Vec<u32>> = vec![Vec::new(); num_docs];
    let mut seen = 0usize;
    for (line_no, line) in lines {
        let line = line?;
        let mut fields = line.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            fields
                .next()
                .ok_or_else(|| Error::parse(line_no, format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::parse(line_no, format!("{what} is not a non-negative integer")))
        };
        let doc = next("docID")?;
        let word = next("wordID")?;
        let count = next("count")?;
        if fields.next().is_some() {
            return Err(Error::parse(line_no, "expected exactly three fields"));
        }
        if doc == 0 || doc > num_docs as u64 {
            return Err(Error::parse(line_no, format!("docID {doc} outside 1..={num_docs}")));
        }
        if word == 0 || word > vocab_size as u64 {
            return Err(Error::parse(line_no, format!("wordID {word} outside 1..={vocab_size}")));
        }
        if count == 0 {
            return Err(Error::parse(line_no, "count must be positive"));
        }
        seen += 1;
        if seen > nnz {
            return Err(Error::parse(line_no, format!("more than the declared {nnz} triples")));
        }
        docs[doc as usize - 1].push(word as u32);
    }
    if seen != nnz {
        return Err(Error::parse(0, format!("declared {nnz} triples but found {seen}")));
    }

    let vectors = docs
        .into_iter()
        .map(|words| SparseBinaryVector::from_unsorted(vocab_size, words))
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus {
        num_docs,
        vocab_size,
        vectors,
    })
}

/// Opens a docword file, transparently decompressing gzip input.
pub fn read_docword(path: impl AsRef<Path>) -> Result<Corpus> {
    let mut file = BufReader::new(File::open(path)?);
    let gzipped = file.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    if gzipped {
        parse_docword(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        parse_docword(file)
    }
}

/// Parses from any reader, sniffing for gzip.
pub fn parse_docword_auto<R: Read>(reader: R) -> Result<Corpus> {
    let mut buf = BufReader::new(reader);
    if buf.fill_buf()?.starts_with(&[0x1f, 0x8b]) {
        parse_docword(BufReader::new(MultiGzDecoder::new(buf)))
    } else {
        parse_docword(buf)
    }
}

/// Writes the corpus back out with every count set to 1.
pub fn write_docword<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    writeln!(out, "{}\n{}\n{}", corpus.num_docs, corpus.vocab_size, corpus.nnz())?;
    for (d, v) in corpus.vectors.iter().enumerate() {
        for &w in v.support() {
            writeln!(out, "{} {} 1", d + 1, w)?;
        }
    }
    Ok(())
}

/// Uniform sample of `n` documents without replacement, kept in corpus order.
pub fn sample_corpus(c: &Corpus, n: usize, seed: u64) -> Result<Corpus> {
    if n == 0 {
        return Err(Error::invalid("sample size must be >= 1"));
    }
    if n > c.num_docs {
        return Err(Error::invalid(format!(
            "cannot sample {n} of {} documents",
            c.num_docs
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, c.num_docs, n).into_vec();
    picked.sort_unstable();
    Ok(Corpus {
        num_docs: n,
        vocab_size: c.vocab_size,
        vectors: picked.into_iter().map(|i| c.vectors[i].clone()).collect(),
    })
}

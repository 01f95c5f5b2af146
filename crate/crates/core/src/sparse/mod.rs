//! Bag-of-words retrieval: tokenizer, inverted index, BM25.

mod bm25;
mod index;

pub use bm25::{bm25_idf, bm25_search, bm25_term_weight, Bm25Params};
pub use index::{build_inverted_index, InvertedIndex, Posting, TermStats, SPARSE_BIN, SPARSE_HEADER};

/// Lowercases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

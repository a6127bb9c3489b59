pub mod fs;
pub mod sexpr;
pub mod grammar;
pub mod lexicon;
pub mod morph;
pub mod caseframe;
pub mod order;
pub mod np;
pub mod engine;
pub mod text;
pub mod corpus;

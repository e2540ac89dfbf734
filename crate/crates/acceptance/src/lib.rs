//! Holds the `acceptance` test target only; run it with
//! `cargo test -p xxcouple-acceptance --test acceptance`.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}
example!(embeddings_io);
example!(train_sgns);
example!(cca_alignment);
example!(bli_eval);
example!(context_similarity);
example!(zero_shot);
example!(pipeline);

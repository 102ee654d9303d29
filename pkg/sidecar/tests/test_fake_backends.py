from perturbkit_sidecar import fake


class TestFakeDeterminism:
    def test_paraphrase_stable(self):
        text = "We use a small method and show a good result."
        assert fake.paraphrase(text, 40, 40) == fake.paraphrase(text, 40, 40)

    def test_translate_is_involution(self):
        text = "The model keeps small couplings stable. It also runs fast."
        assert fake.translate(fake.translate(text, "en", "fr"), "fr", "en") == text

    def test_fill_mask_fixed_table(self):
        fills = fake.fill_mask("The <|mask|> sat", "word")
        assert fills == fake.fill_mask("The <|mask|> sat", "word")
        assert len(fills) == 1
        assert fills[0] in fake._FILL_WORDS

    def test_perplexity_positive_and_stable(self):
        v = fake.perplexity("Some text to score.")
        assert v > 0
        assert v == fake.perplexity("Some text to score.")

    def test_similarity_bounds(self):
        assert fake.similarity("a b c", "a b c") == 1.0
        assert fake.similarity("a b c", "x y z") == 0.0
        assert 0.0 < fake.similarity("a b c", "a y z") < 1.0

    def test_judge_scores_in_range(self):
        scores = fake.judge([f"text {i}" for i in range(13)])
        assert len(scores) == 13
        assert all(1 <= s <= 10 for s in scores)


class TestFakeParaphraseControls:
    def test_zero_diversity_is_identity(self):
        text = "We use a small method and show a good result."
        assert fake.paraphrase(text, 0, 0) == text

    def test_lexical_control_changes_words(self):
        text = "We use a small method and show a good result."
        out = fake.paraphrase(text, 100, 0)
        assert out != text
        assert len(out.split()) == len(text.split())

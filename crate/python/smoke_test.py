"""Quick end-to-end check of the urtlab extension module."""

import urtlab
from urtlab import Threshold, Word


def main():
    w = Word("1234123", 4)
    assert len(w) == 7 and w.letters() == [1, 2, 3, 4, 1, 2, 3]
    assert Word([1, 2, 3], 3) == Word("123", 3)

    t = Threshold.parse("3/2")
    found = urtlab.find_powers(w, t)
    assert found[0] == {"start": 0, "period": 4, "excess": 3, "kind": "ordinary", "exponent": "7/4"}
    assert not urtlab.is_free(w, t)

    out = urtlab.longest_free_word(4, threshold=Threshold.dejean_like(4))
    assert out["max_length"] == 7
    assert urtlab.is_free(Word(out["witnesses"][0], 4), Threshold.dejean_like(4))
    assert urtlab.longest_free_word(2, pattern_m=3)["max_length"] == 9
    try:
        urtlab.longest_free_word(3, pattern_m=3, max_nodes=1000)
    except urtlab.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget was not enforced")

    enc = urtlab.encode(Word("12342541243", 5), 5)
    assert str(enc["code"]) == "3131231"
    assert urtlab.decode(enc["prefix"], enc["code"], 5) == Word("12342541243", 5)

    assert str(urtlab.fixed_point("f4", 9)) == "121122121"
    x = urtlab.construct(8, 1000)
    assert urtlab.is_free(x, Threshold.dejean_like(8, strict=True))

    assert sorted(urtlab.kernel_pairs(4)) == [("2112112212", "21"), ("2121", "")]
    assert urtlab.kernel_pairs(8) == []
    assert urtlab.intertwiner(4) == [1, 4, 2, 3]

    for theorem in ["urt3", "product", "main-4"]:
        report = urtlab.verify(theorem, length=1000)
        assert all(c["pass"] for c in report["checks"]), report

    try:
        Threshold.parse("1.5")
    except urtlab.UrtlabError:
        pass
    else:
        raise AssertionError("decimal threshold accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()

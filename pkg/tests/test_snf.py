from dagquot.snf import (
    AbelianInvariants,
    invariants_from_rows,
    mat_det,
    mat_identity,
    mat_mul,
    smith_normal_form,
)


def assert_snf_contract(a):
    rows, cols = len(a), len(a[0]) if a else 0
    u, d, v = smith_normal_form(a)
    assert mat_mul(mat_mul(u, a), v) == d
    assert abs(mat_det(u)) == 1
    assert abs(mat_det(v)) == 1
    diag = [d[i][i] for i in range(min(rows, cols))]
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert d[i][j] == 0
    nonzero = [x for x in diag if x != 0]
    assert all(x > 0 for x in nonzero)
    # zeros come after the nonzero chain, and the chain divides
    assert diag[: len(nonzero)] == nonzero
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0
    return d


class TestSmithNormalForm:
    def test_single_row(self):
        _, d, _ = smith_normal_form([[1, 0, 0, 0]])
        assert d == [[1, 0, 0, 0]]

    def test_diag_2_3_becomes_1_6(self):
        # oracle: 2Z + 3Z = Z as index-6 sublattices get invariants (1, 6)
        d = assert_snf_contract([[2, 0], [0, 3]])
        assert [d[0][0], d[1][1]] == [1, 6]

    def test_zero_matrix(self):
        u, d, v = smith_normal_form([[0, 0], [0, 0]])
        assert d == [[0, 0], [0, 0]]
        assert u == mat_identity(2)
        assert v == mat_identity(2)

    def test_empty(self):
        u, d, v = smith_normal_form([])
        assert (u, d, v) == ([], [], [])

    def test_known_torsion(self):
        d = assert_snf_contract([[2, 0], [0, 1]])
        assert sorted([d[0][0], d[1][1]]) == [1, 2]

    def test_random_matrices(self, rng):
        for _ in range(200):
            rows = rng.randint(1, 6)
            cols = rng.randint(1, 6)
            a = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
            assert_snf_contract(a)

    def test_divisibility_fixup_case(self):
        # 2x2 with coprime diagonal forced through the chain repair
        d = assert_snf_contract([[2, 0], [0, 3]])
        assert d[1][1] % d[0][0] == 0


class TestDeterminant:
    def test_known(self):
        assert mat_det([[1, 2], [3, 4]]) == -2
        assert mat_det([[2, 0], [0, 3]]) == 6
        assert mat_det(mat_identity(5)) == 1
        assert mat_det([]) == 1

    def test_singular(self):
        assert mat_det([[1, 2], [2, 4]]) == 0

    def test_matches_cofactor_expansion(self, rng):
        def cofactor_det(m):
            if len(m) == 1:
                return m[0][0]
            return sum(
                (-1) ** j * m[0][j] * cofactor_det(
                    [row[:j] + row[j + 1:] for row in m[1:]]
                )
                for j in range(len(m))
            )

        for _ in range(50):
            n = rng.randint(1, 4)
            m = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
            assert mat_det(m) == cofactor_det(m)


class TestInvariants:
    def test_free(self):
        assert invariants_from_rows(3, []) == AbelianInvariants(3, ())

    def test_kill_one_generator(self):
        assert invariants_from_rows(4, [[1, 0, 0, 0]]) == AbelianInvariants(3, ())

    def test_torsion(self):
        assert invariants_from_rows(2, [[2, 0], [0, 1]]) == AbelianInvariants(0, (2,))

    def test_dependent_rows(self):
        # (2,2) is already a multiple of (1,1): quotient is Z, no torsion
        inv = invariants_from_rows(2, [[1, 1], [2, 2]])
        assert inv == AbelianInvariants(1, ())

    def test_genuine_torsion_from_multiples(self):
        # rows (1,1) and (3,1): determinant -2, quotient Z/2
        inv = invariants_from_rows(2, [[1, 1], [3, 1]])
        assert inv == AbelianInvariants(0, (2,))

    def test_str(self):
        assert str(AbelianInvariants(2, (2, 6))) == "Z^2 + Z/2 + Z/6"
        assert str(AbelianInvariants(0, ())) == "0"

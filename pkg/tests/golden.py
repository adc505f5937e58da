"""Printed reference values used as golden test vectors."""

# hatted 4-node matrix; rows/columns: claw, P4, paw, C4, diamond, K4
U4_HATTED = [
    [1, 0, 1, 0, 2, 4],
    [0, 1, 2, 4, 6, 12],
    [0, 0, 1, 0, 4, 12],
    [0, 0, 0, 1, 1, 3],
    [0, 0, 0, 0, 1, 6],
    [0, 0, 0, 0, 0, 1],
]

# net counts; rows H_2,1,1 H_3,1,1 H_3,1,2 H_3,2,1; columns H_4,1,1 .. H_4,6,1
NET_BLOCK_INTO_4 = [
    [1, 3, 1, 2, 1, 2, 3, 2, 2, 3, 3],
    [2, 0, 1, 1, 2, 1, 0, 2, 2, 0, 0],
    [0, 3, 0, 1, 0, 0, 2, 1, 0, 1, 0],
    [0, 0, 0, 0, 0, 1, 1, 0, 1, 2, 3],
]

FAMILY_SIZES_HATTED = [1, 1, 2, 6, 21, 112, 853, 11117]
FAMILY_SIZES_ORBIT = [1, 1, 3, 11, 58, 407, 4306, 72489]

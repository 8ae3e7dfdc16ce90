# SPDX-FileCopyrightText: 2023-present Trevor Manz <trevor.j.manz@gmail.com>
#
# SPDX-License-Identifier: MIT

use pebble_core::engine::{answer_all, consult_sync, Session};
use pebble_core::tooling::format_answer;

fn session(program: &str) -> Session {
    let s = Session::new(1_000_000);
    consult_sync(&s, program).unwrap_or_else(|e| panic!("consult: {e}"));
    s
}

fn answers(s: &Session, goal: &str) -> Vec<String> {
    answer_all(s, goal).iter().map(|a| format_answer(s, a)).collect()
}

fn first(s: &Session, goal: &str) -> String {
    answers(s, goal).into_iter().next().unwrap_or_else(|| "false.".into())
}

#[track_caller]
fn check(s: &Session, goal: &str, expected: &str) {
    assert_eq!(first(s, goal), expected, "goal: {goal}");
}

#[test]
fn arithmetic() {
    let s = session("");
    check(&s, "X is 2+3*4", "X = 14");
    check(&s, "X is 7/2", "X = 3.5");
    check(&s, "X is 6/2", "X = 3");
    check(&s, "X is 7//2", "X = 3");
    check(&s, "X is -7 mod 2", "X = 1");
    check(&s, "X is 2**10", "X = 1024");
    check(&s, "X is 2**100", "X = 1267650600228229401496703205376");
    check(&s, "X is max(3, 4.0)", "X = 4.0");
    check(&s, "X is abs(-3)", "X = 3");
    check(&s, "X is 1 + a", "uncaught exception: error(type_error(evaluable,a/0),(is)/2).");
    check(&s, "X is 1/0", "uncaught exception: error(evaluation_error(zero_divisor),(is)/2).");
    check(&s, "X is Y + 1", "uncaught exception: error(instantiation_error,(is)/2).");
    check(&s, "1 < 2", "true.");
    check(&s, "2 =:= 2.0", "true.");
    assert_eq!(answers(&s, "between(1, 3, X)"), ["X = 1", "X = 2", "X = 3"]);
    check(&s, "succ(X, 4)", "X = 3");
    check(&s, "X is truncate(3.7)", "X = 3");
}

#[test]
fn control() {
    let s = session("p(1). p(2). p(3).\nq(X) :- p(X), X > 1, !.");
    check(&s, "q(X)", "X = 2");
    check(&s, "(p(X), X > 1 -> Y = yes ; Y = no)", "X = 2, Y = yes");
    check(&s, "\\+ p(4)", "true.");
    check(&s, "catch(throw(x), E, true)", "E = x");
    let h = session("");
    assert!(first(&h, "catch(halt(4), _, true), write(after)").starts_with("uncaught exception"));
    assert_eq!((h.halted(), h.take_output()), (Some(4), String::new()));
    check(&s, "findall(X, p(X), L)", "L = [1,2,3]");
    check(&s, "forall(p(X), X > 0)", "true.");
    check(&s, "once(p(X))", "X = 1");
    check(&s, "call(p, X)", "X = 1");
    check(&s, "G = p(X), call(G)", "G = p(1), X = 1");
    check(&s, "foo(1)", "uncaught exception: error(existence_error(procedure,foo/1),foo/1).");
    assert_eq!(answers(&s, "(p(X) *-> true ; X = none)").len(), 3);
    check(&s, "(fail *-> X = a ; X = none)", "X = none");
    check(&s, "not(p(5))", "true.");
    check(&s, "ignore(fail)", "true.");
}

#[test]
fn all_solutions() {
    let s = session("age(peter, 7). age(ann, 11). age(pat, 8). age(tom, 5). age(mike, 11).\nc(a, 1). c(b, 2). c(a, 3).");
    check(&s, "setof(N-A, age(A, N), L)", "L = [5-tom,7-peter,8-pat,11-ann,11-mike]");
    assert_eq!(answers(&s, "bagof(N, c(K, N), L)"), ["K = a, L = [1,3]", "K = b, L = [2]"]);
    check(&s, "bagof(N, K^c(K, N), L)", "L = [1,2,3]");
    check(&s, "bagof(X, fail, L)", "false.");
    check(&s, "aggregate_all(count, age(_, _), C)", "C = 5");
    check(&s, "aggregate_all(sum(A), age(_, A), S)", "S = 42");
    check(&s, "aggregate_all(max(A), age(_, A), S)", "S = 11");
    check(&s, "findall(X-Y, member(X-Y, [1-a, 2-b]), L)", "L = [1-a,2-b]");
}

#[test]
fn terms_and_atoms() {
    let s = session("");
    check(&s, "functor(f(a, b), N, A)", "N = f, A = 2");
    check(&s, "functor(T, f, 2), T = f(a, b)", "T = f(a,b)");
    check(&s, "f(a, b) =.. L", "L = [f,a,b]");
    check(&s, "T =.. [g, 1]", "T = g(1)");
    check(&s, "arg(2, f(a, b), X)", "X = b");
    check(&s, "copy_term(f(X, Y, X), C), C = f(1, 2, Z)", "C = f(1,2,1), Z = 1");
    check(&s, "atom_length(hello, N)", "N = 5");
    check(&s, "atom_codes(ab, L)", "L = [97,98]");
    check(&s, "atom_chars(X, [a, b])", "X = ab");
    check(&s, "atom_concat(ab, cd, X)", "X = abcd");
    assert_eq!(answers(&s, "atom_concat(X, Y, ab)").len(), 3);
    check(&s, "sub_atom(hello, 1, 3, A, S)", "A = 1, S = ell");
    check(&s, "number_codes(N, \"42\")", "N = 42");
    check(&s, "atom_number('3.5', N)", "N = 3.5");
    check(&s, "char_code(C, 0'a)", "C = a");
    check(&s, "upcase_atom(abc, U)", "U = ABC");
    check(&s, "atomic_list_concat([a, b, c], '-', X)", "X = a-b-c");
    check(&s, "atomic_list_concat(L, '-', 'a-b')", "L = [a,b]");
    check(&s, "term_to_atom(f(a, 'A'), T)", "T = f(a,'A')");
    check(&s, "term_to_atom(T, 'g(1, b)')", "T = g(1,b)");
    check(&s, "compare(O, 1, a)", "O = <");
    check(&s, "msort([b, a, c, a], L)", "L = [a,a,b,c]");
    check(&s, "sort([b, a, c, a], L)", "L = [a,b,c]");
    check(&s, "sort(0, @>=, [1, 3, 2, 3], L)", "L = [3,3,2,1]");
    check(&s, "keysort([b-1, a-2, b-0], L)", "L = [a-2,b-1,b-0]");
    check(&s, "length(L, 2), L = [a, b]", "L = [a,b]");
    check(&s, "length([a, b], N)", "N = 2");
    check(&s, "X = \"ab\"", "X = [97,98]");
    check(&s, "X == Y", "false.");
    check(&s, "f(X) @< f(Y)", "true.");
    check(&s, "term_variables(f(X, g(Y), X), Vs), X = 1, Y = 2", "X = 1, Y = 2, Vs = [1,2]");
}

#[test]
fn lists_library() {
    let s = session("");
    check(&s, "append([a], [b], Z)", "Z = [a,b]");
    assert_eq!(answers(&s, "member(X, [a, b])"), ["X = a", "X = b"]);
    check(&s, "reverse([1, 2, 3], R)", "R = [3,2,1]");
    check(&s, "nth0(1, [a, b, c], X)", "X = b");
    check(&s, "nth1(1, [a, b, c], X)", "X = a");
    check(&s, "last([a, b, c], X)", "X = c");
    check(&s, "msort([c, a], L)", "L = [a,c]");
    check(&s, "sum_list([1, 2, 3], S)", "S = 6");
    check(&s, "max_list([1, 5, 3], S)", "S = 5");
    check(&s, "numlist(1, 4, L)", "L = [1,2,3,4]");
    check(&s, "maplist([X, Y]>>(Y is X * 2), [1, 2], L)", "L = [2,4]");
    check(&s, "foldl([X, A0, A]>>(A is A0 + X), [1, 2, 3], 0, S)", "S = 6");
    check(&s, "exclude([X]>>(X > 1), [1, 2, 3], L)", "L = [1]");
    check(&s, "include([X]>>(X > 1), [1, 2, 3], L)", "L = [2,3]");
    check(&s, "select(b, [a, b, c], L)", "L = [a,c]");
    check(&s, "permutation([1, 2, 3], P)", "P = [1,2,3]");
    assert_eq!(answers(&s, "permutation([1, 2, 3], P)").len(), 6);
    check(&s, "flatten([1, [2, [3]]], L)", "L = [1,2,3]");
    check(&s, "list_to_set([a, b, a], L)", "L = [a,b]");
    check(&s, "subtract([1, 2, 3], [2], L)", "L = [1,3]");
    check(&s, "exclude(==(a), [a, b], L)", "L = [b]");
    check(&s, "maplist(succ, [1, 2], L)", "L = [2,3]");
    check(&s, "sumlist([1], S)", "S = 1");
    check(&s, "pairs_keys_values(P, [a, b], [1, 2])", "P = [a-1,b-2]");
}

#[test]
fn database() {
    let s = session(":- dynamic(f/1).\nf(1).");
    check(&s, "assertz(f(2)), findall(X, f(X), L)", "L = [1,2]");
    check(&s, "retract(f(1)), findall(X, f(X), L)", "L = [2]");
    check(&s, "asserta(f(0)), f(X)", "X = 0");
    check(&s, "retractall(f(_)), findall(X, f(X), L)", "L = []");
    check(&s, "assertz(g(1)), g(X)", "X = 1");
    check(&s, "assertz((h(X) :- X > 1)), h(2)", "true.");
    check(&s, "clause(h(X), B)", "B = X>1");
    check(&s, "assertz(atom_length(a, b))", "uncaught exception: error(permission_error(modify,static_procedure,atom_length/2),assertz/1).");
    check(&s, "abolish(g/1), catch(g(_), error(E, _), true)", "E = existence_error(procedure,g/1)");
}

#[test]
fn output_and_format() {
    let s = session("");
    first(&s, "write(f('A', [1, 2], 'b c')), nl");
    assert_eq!(s.take_output(), "f(A,[1,2],b c)\n");
    first(&s, "writeq(f('A', [1, 2], 'b c'))");
    assert_eq!(s.take_output(), "f('A',[1,2],'b c')");
    first(&s, "write_canonical([a|_])");
    assert!(s.take_output().starts_with("[a|_"));
    first(&s, "format(\"~w and ~a~n\", [foo(X), bar])");
    assert!(s.take_output().ends_with(" and bar\n"));
    check(&s, "format(atom(A), '~d items', [3])", "A = 3 items");
    check(&s, "format(atom(A), '~2f', [3.14159])", "A = 3.14");
    check(&s, "format(atom(A), '~a~t~8|~a', [ab, cd])", "A = ab      cd");
    check(&s, "format(atom(A), '~t~a~6|', [ab])", "A =     ab");
    check(&s, "format(atom(A), '~e', [1.5])", "A = 1.500000e+00");
    check(&s, "format(atom(A), '~s', [[104, 105]])", "A = hi");
    check(&s, "format(atom(A), '~q', [[a, 'B']])", "A = [a,'B']");
    check(&s, "format(atom(A), '~2d', [314])", "A = 3.14");
    check(&s, "format(atom(A), '~D', [1234567])", "A = 1,234,567");
    check(&s, "format(atom(A), '~8r', [64])", "A = 100");
    check(&s, "format(atom(A), '~c', [65])", "A = A");
    check(&s, "format(atom(A), '~p', [x])", "A = x");
    check(&s, "format(atom(A), 'x~i~w', [a, b])", "A = xb");
}

#[test]
fn flags_and_ops() {
    let s = session(":- op(200, xfy, ::).\nlist_op(a :: b).");
    check(&s, "list_op(X :: Y)", "X = a, Y = b");
    check(&s, "current_op(P, T, ::)", "P = 200, T = xfy");
    check(&s, "current_prolog_flag(bounded, F)", "F = false");
    check(&s, "set_prolog_flag(double_quotes, atom), current_prolog_flag(double_quotes, F)", "F = atom");
    check(&s, "set_prolog_flag(unknown, fail), nosuch", "false.");
}

#[test]
fn modules_and_files() {
    let s = session("");
    let fs = std::rc::Rc::new(pebble_core::builtins::os::VirtualFs::new());
    fs.insert("m.pl", ":- module(m, [hello/1]).\nhello(X) :- secret(X).\nsecret(world).");
    fs.insert("plain.pl", "fact(1).");
    pebble_core::builtins::os::set_file_system(&s, fs.clone());
    check(&s, "use_module(m), hello(X)", "X = world");
    check(&s, "catch(secret(X), error(E, _), true)", "E = existence_error(procedure,secret/1)");
    check(&s, "consult(plain), fact(X)", "X = 1");
    assert!(first(&s, "open('out.txt', write, S), write(S, hi), nl(S), close(S)").starts_with("S = "));
    assert_eq!(fs.get("out.txt").unwrap(), "hi\n");
    assert!(first(&s, "open('plain.pl', read, S), read(S, T), read(S, E), close(S)").ends_with("T = fact(1), E = end_of_file"));
    check(&s, "directory_files('.', L)", "L = [m.pl,out.txt,plain.pl]");
    check(&s, "exists_file('m.pl')", "true.");
    check(&s, "use_module(library(lists)), append(X, [], [])", "X = []");
    fs.insert("libs/util.pl", ":- module(util, [twice/2]).\ntwice(X, Y) :- Y is 2 * X.");
    assert!(first(&s, "catch(use_module(library(util)), error(E, _), true)").starts_with("E = existence_error(source_sink"));
    check(&s, "assertz(file_search_path(library, libs)), use_module(library(util)), twice(2, Y)", "Y = 4");
}

env smalltalk
class Person stonly super Object ivars first last
def Person name:first: vis public sig 2 body (seq (ivset last (arg 0)) (ivset first (arg 1)))
def Person fullName vis public sig 0 body (concat (ivar first) (concat " " (ivar last)))
def meta:Person with: vis public sig 1 body (call (arg 0) (send (self) new))
env ruby
defclassprim Person __new with:
defprim Person set_name name:first:
defprim Person full_name fullName
send Person __new blockv (block 1 (seq (send (arg 0) set_name "Doe" "John") (arg 0)))
send @lastresult full_name
expect "John Doe"

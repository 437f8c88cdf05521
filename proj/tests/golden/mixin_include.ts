env ruby
class Person super Object ivars name
inspect hierarchy Person
module Tagging
def Tagging tag vis public sig 0 body "tagged"
include Person Tagging
inspect hierarchy Person
send new Person tag
expect "tagged"
env smalltalk
send new Person tag
expect_error NoMethodError
